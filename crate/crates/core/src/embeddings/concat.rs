use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How two document vectors `u` (seed) and `v` (target) are joined.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ConcatScheme {
    /// `[u; v]`
    #[serde(rename = "uv")]
    Uv,
    /// `[u; v; |u - v|]`
    #[serde(rename = "uvd")]
    UvDiff,
    /// `[u; v; |u - v|; u * v]`
    #[serde(rename = "uvdp")]
    UvDiffProd,
}

impl ConcatScheme {
    pub const ALL: [ConcatScheme; 3] = [ConcatScheme::Uv, ConcatScheme::UvDiff, ConcatScheme::UvDiffProd];

    pub fn blocks(self) -> usize {
        match self {
            ConcatScheme::Uv => 2,
            ConcatScheme::UvDiff => 3,
            ConcatScheme::UvDiffProd => 4,
        }
    }

    pub fn output_dim(self, dim: usize) -> usize {
        self.blocks() * dim
    }

    pub fn short_name(self) -> &'static str {
        match self {
            ConcatScheme::Uv => "uv",
            ConcatScheme::UvDiff => "uvd",
            ConcatScheme::UvDiffProd => "uvdp",
        }
    }

    /// Notation used in report tables.
    pub fn notation(self) -> &'static str {
        match self {
            ConcatScheme::Uv => "[u;v]",
            ConcatScheme::UvDiff => "[u;v;|u-v|]",
            ConcatScheme::UvDiffProd => "[u;v;|u-v|;u*v]",
        }
    }
}

impl fmt::Display for ConcatScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for ConcatScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "uv" => Ok(ConcatScheme::Uv),
            "uvd" | "uv_diff" => Ok(ConcatScheme::UvDiff),
            "uvdp" | "uv_diff_prod" => Ok(ConcatScheme::UvDiffProd),
            _ => Err(Error::Config(format!(
                "unknown concatenation scheme {s:?} (expected uv, uvd or uvdp)"
            ))),
        }
    }
}

/// Joins `u` and `v` under `scheme`.
pub fn concat<T: Scalar>(u: &[T], v: &[T], scheme: ConcatScheme) -> Result<Vec<T>> {
    let mut out = Vec::with_capacity(scheme.output_dim(u.len()));
    concat_into(u, v, scheme, &mut out)?;
    Ok(out)
}

/// [`concat`] appending to an existing buffer.
pub fn concat_into<T: Scalar>(u: &[T], v: &[T], scheme: ConcatScheme, out: &mut Vec<T>) -> Result<()> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            actual: v.len(),
        });
    }
    out.extend_from_slice(u);
    out.extend_from_slice(v);
    if scheme != ConcatScheme::Uv {
        out.extend(u.iter().zip(v).map(|(&a, &b)| (a - b).abs()));
    }
    if scheme == ConcatScheme::UvDiffProd {
        out.extend(u.iter().zip(v).map(|(&a, &b)| a * b));
    }
    Ok(())
}
