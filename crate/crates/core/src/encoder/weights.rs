use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Per-position weights of the reconstruction error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "lowercase")]
pub enum WeightScheme {
    /// Every position weighs 1.
    Uniform,
    /// The centre weighs `center`, every other position 1.
    Focused { center: f64 },
    /// 4 at the centre, 3 and 2 at distances one and two, 1 beyond.
    Tapered,
}

impl Default for WeightScheme {
    fn default() -> Self {
        WeightScheme::Focused { center: 2.0 }
    }
}

impl WeightScheme {
    /// Focused weighting used for encoders that feed a tagger.
    pub fn tagging_default() -> Self {
        WeightScheme::Focused { center: 3.0 }
    }

    pub fn weights<S: Scalar>(&self, radius: usize) -> Vec<S> {
        (0..2 * radius + 1)
            .map(|k| {
                let dist = k.abs_diff(radius);
                let w = match *self {
                    WeightScheme::Uniform => 1.0,
                    WeightScheme::Focused { center } => {
                        if dist == 0 {
                            center
                        } else {
                            1.0
                        }
                    }
                    WeightScheme::Tapered => match dist {
                        0 => 4.0,
                        1 => 3.0,
                        2 => 2.0,
                        _ => 1.0,
                    },
                };
                S::lit(w)
            })
            .collect()
    }
}

pub fn weights_for<S: Scalar>(scheme: &WeightScheme, radius: usize) -> Vec<S> {
    scheme.weights(radius)
}

impl FromStr for WeightScheme {
    type Err = Error;

    /// Accepts `uniform`, `tapered`, `focused` (centre 2) and `focused:<w>`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        match (name, arg) {
            ("uniform", None) => Ok(WeightScheme::Uniform),
            ("tapered", None) => Ok(WeightScheme::Tapered),
            ("focused", None) => Ok(WeightScheme::default()),
            ("focused", Some(a)) => {
                let center: f64 = a
                    .parse()
                    .map_err(|_| Error::InvalidConfig(format!("bad focus weight {a:?}")))?;
                if !(center > 0.0 && center.is_finite()) {
                    return Err(Error::InvalidConfig(format!("focus weight must be positive, got {center}")));
                }
                Ok(WeightScheme::Focused { center })
            }
            _ => Err(Error::InvalidConfig(format!("unknown weighting scheme {s:?}"))),
        }
    }
}

impl fmt::Display for WeightScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WeightScheme::Uniform => write!(f, "uniform"),
            WeightScheme::Focused { center } => write!(f, "focused:{center}"),
            WeightScheme::Tapered => write!(f, "tapered"),
        }
    }
}
