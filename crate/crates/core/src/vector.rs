use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeSeq;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Largest workspace dimension supported.
pub const MAX_DIM: usize = 3;

pub const CLIP_REL_TOL: f64 = 1e-12;

/// Small fixed-capacity real vector used for positions and displacements.
///
/// Unused trailing components are kept at zero so derived equality is exact.
#[derive(Clone, Copy, PartialEq)]
pub struct Vector {
    coords: [f64; MAX_DIM],
    dim: usize,
}

impl Vector {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::InvalidDimension(coords.len()));
        }
        let mut c = [0.0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Self { coords: c, dim: coords.len() })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!((1..=MAX_DIM).contains(&dim), "unsupported dimension {dim}");
        Self { coords: [0.0; MAX_DIM], dim }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.dim]
    }

    pub fn norm(&self) -> f64 {
        self.as_slice().iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|x| x.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.as_slice().iter().all(|&x| x == 0.0)
    }

    /// Scales the vector down to `max_norm` if it is longer, keeping its direction.
    ///
    /// Vectors within a relative `1e-12` of the cap are left alone so clipping
    /// is idempotent under rounding.
    pub fn clip_norm(self, max_norm: f64) -> Self {
        let n = self.norm();
        if n > max_norm * (1.0 + CLIP_REL_TOL) && n > 0.0 {
            self * (max_norm / n)
        } else {
            self
        }
    }

    pub fn ensure_dim(&self, expected: usize) -> Result<()> {
        if self.dim != expected {
            return Err(Error::DimensionMismatch { expected, found: self.dim });
        }
        Ok(())
    }

    pub(crate) fn zip_with(self, other: Self, f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            out.coords[i] = f(self.coords[i], other.coords[i]);
        }
        out
    }
}

impl Index<usize> for Vector {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.as_slice()[i]
    }
}

impl Add for Vector {
    type Output = Vector;

    fn add(self, rhs: Vector) -> Vector {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for Vector {
    type Output = Vector;

    fn sub(self, rhs: Vector) -> Vector {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl Mul<f64> for Vector {
    type Output = Vector;

    fn mul(self, k: f64) -> Vector {
        let mut out = self;
        for x in &mut out.coords[..self.dim] {
            *x *= k;
        }
        out
    }
}

impl Neg for Vector {
    type Output = Vector;

    fn neg(self) -> Vector {
        self * -1.0
    }
}

impl fmt::Debug for Vector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.as_slice()).finish()
    }
}

impl Serialize for Vector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = serializer.serialize_seq(Some(self.dim))?;
        for x in self.as_slice() {
            seq.serialize_element(x)?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct CoordsVisitor;

        impl<'de> Visitor<'de> for CoordsVisitor {
            type Value = Vector;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a list of 1 to {MAX_DIM} numbers")
            }

            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<Vector, A::Error> {
                let mut coords = Vec::with_capacity(MAX_DIM);
                while let Some(x) = seq.next_element::<f64>()? {
                    coords.push(x);
                }
                Vector::new(&coords).map_err(de::Error::custom)
            }
        }

        deserializer.deserialize_seq(CoordsVisitor)
    }
}
