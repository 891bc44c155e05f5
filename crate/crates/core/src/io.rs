//! Group description files and the sorted packed-key dump.
//!
//! ```toml
//! prime = 3
//! precision = 2
//! generators = [[[1, 3], [0, 1]], [[1, 0], [3, 1]]]
//!
//! [lie]
//! x1 = [[0, 0], [3, 0]]
//! x2 = [[3, 0], [0, -3]]
//! x3 = [[0, 3], [0, 0]]
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{close, GroupClosure};
use crate::lie::ReducedBasis;
use crate::mat::Mat2;
use crate::padic::PadicContext;

type Rows = [[i64; 2]; 2];

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupFile {
    prime: u64,
    precision: u32,
    generators: Vec<Rows>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lie: Option<LieSection>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LieSection {
    x1: Rows,
    x2: Rows,
    x3: Rows,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupDescription {
    pub context: PadicContext,
    pub generators: Vec<Mat2>,
    pub lie: Option<[Mat2; 3]>,
}

impl GroupDescription {
    pub fn close(&self, cap: usize) -> Result<GroupClosure> {
        close(self.context, &self.generators, cap)
    }

    /// The same description with every matrix reduced to precision `n`.
    pub fn at_precision(&self, n: u32) -> Result<GroupDescription> {
        let c = self.context.at_precision(n)?;
        Ok(GroupDescription {
            context: c,
            generators: self.generators.iter().map(|g| g.reduce_to(c)).collect(),
            lie: self.lie.map(|l| l.map(|x| x.reduce_to(c))),
        })
    }
}

fn to_mat(ctx: PadicContext, r: &Rows) -> Mat2 {
    Mat2::new(ctx, [r[0][0], r[0][1], r[1][0], r[1][1]])
}

fn to_rows(g: &Mat2) -> Rows {
    let e = g.entries().map(|x| x as i64);
    [[e[0], e[1]], [e[2], e[3]]]
}

pub fn parse_group(text: &str) -> Result<GroupDescription> {
    let f: GroupFile = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let ctx = PadicContext::new(f.prime, f.precision)?;
    let generators: Vec<Mat2> = f.generators.iter().map(|r| to_mat(ctx, r)).collect();
    if let Some(g) = generators.iter().find(|g| !g.is_invertible()) {
        return Err(Error::Parse(format!("generator {:?} is not invertible", to_rows(g))));
    }
    let lie = f.lie.map(|l| [to_mat(ctx, &l.x1), to_mat(ctx, &l.x2), to_mat(ctx, &l.x3)]);
    if let Some(x) = lie.iter().flatten().find(|x| !x.trace().is_zero()) {
        return Err(Error::Parse(format!("lie basis element {:?} is not traceless", to_rows(x))));
    }
    Ok(GroupDescription { context: ctx, generators, lie })
}

pub fn render_group(ctx: PadicContext, generators: &[Mat2], lie: Option<&ReducedBasis>) -> String {
    let f = GroupFile {
        prime: ctx.prime(),
        precision: ctx.precision(),
        generators: generators.iter().map(to_rows).collect(),
        lie: lie.map(|b| LieSection { x1: to_rows(&b.x(0)), x2: to_rows(&b.x(1)), x3: to_rows(&b.x(2)) }),
    };
    toml::to_string(&f).expect("plain data serializes")
}

/// Reads a dump written by [`GroupClosure::dump_keys`].
pub fn parse_key_dump(ctx: PadicContext, text: &str) -> Result<GroupClosure> {
    let m = ctx.modulus();
    let limit = m.checked_pow(4).ok_or_else(|| Error::Parse("modulus too large for a key dump".into()))?;
    let mut keys = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let k: u64 = line.parse().map_err(|_| Error::Parse(format!("line {}: not a key: {line:?}", i + 1)))?;
        if k >= limit {
            return Err(Error::Parse(format!("line {}: key {k} out of range", i + 1)));
        }
        keys.push(k);
    }
    if keys.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Parse("keys must be strictly ascending".into()));
    }
    GroupClosure::from_elements(ctx, keys)
}
