//! Small fixed-capacity points in R^d.
//!
//! The data model allows any dimension up to [`MAX_DIM`]; the numerical
//! routines in this crate are exercised for d = 1 and d = 2 only.

use crate::error::{Error, Result};

/// Capacity of the inline coordinate array.
pub const MAX_DIM: usize = 4;

/// A point (or displacement) in R^d, stored inline so it is `Copy`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    dim: u8,
    c: [f64; MAX_DIM],
}

impl Point {
    pub fn new(coords: &[f64]) -> Result<Self> {
        if coords.is_empty() || coords.len() > MAX_DIM {
            return Err(Error::input(format!(
                "point dimension must be in 1..={MAX_DIM}, got {}",
                coords.len()
            )));
        }
        let mut c = [0.0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Point {
            dim: coords.len() as u8,
            c,
        })
    }

    pub fn zero(dim: usize) -> Self {
        debug_assert!((1..=MAX_DIM).contains(&dim));
        Point {
            dim: dim as u8,
            c: [0.0; MAX_DIM],
        }
    }

    /// One-dimensional point.
    pub fn scalar(x: f64) -> Self {
        let mut c = [0.0; MAX_DIM];
        c[0] = x;
        Point { dim: 1, c }
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn coords(&self) -> &[f64] {
        &self.c[..self.dim as usize]
    }

    /// First coordinate; the built-in coefficient families vary along it.
    pub fn x1(&self) -> f64 {
        self.c[0]
    }

    pub fn get(&self, i: usize) -> f64 {
        debug_assert!(i < self.dim as usize);
        self.c[i]
    }

    pub fn set(&mut self, i: usize, v: f64) {
        debug_assert!(i < self.dim as usize);
        self.c[i] = v;
    }

    pub fn norm(&self) -> f64 {
        self.coords().iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| a * b)
            .sum()
    }

    pub fn add(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for i in 0..self.dim as usize {
            out.c[i] += other.c[i];
        }
        out
    }

    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for i in 0..self.dim as usize {
            out.c[i] -= other.c[i];
        }
        out
    }

    pub fn scale(&self, s: f64) -> Point {
        let mut out = *self;
        for i in 0..self.dim as usize {
            out.c[i] *= s;
        }
        out
    }

    pub fn neg(&self) -> Point {
        self.scale(-1.0)
    }

    pub fn is_finite(&self) -> bool {
        self.coords().iter().all(|v| v.is_finite())
    }

    /// Unit vector at angle `theta` in the plane (d = 2).
    pub fn unit_2d(theta: f64) -> Self {
        Point::new(&[theta.cos(), theta.sin()]).expect("dim 2")
    }
}

impl serde::Serialize for Point {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        ser.collect_seq(self.coords())
    }
}

impl<'de> serde::Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(de)?;
        Point::new(&coords).map_err(serde::de::Error::custom)
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::scalar(x)
    }
}

impl From<[f64; 2]> for Point {
    fn from(xy: [f64; 2]) -> Self {
        Point::new(&xy).expect("dim 2")
    }
}

impl std::fmt::Display for Point {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.dim == 1 {
            write!(f, "{}", self.c[0])
        } else {
            write!(f, "(")?;
            for (i, v) in self.coords().iter().enumerate() {
                if i > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, ")")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_algebra() {
        let a = Point::new(&[3.0, 4.0]).unwrap();
        let b = Point::new(&[1.0, -1.0]).unwrap();
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.dot(&b), -1.0);
        assert_eq!(a.add(&b).coords(), &[4.0, 3.0]);
        assert_eq!(a.sub(&b).coords(), &[2.0, 5.0]);
        assert_eq!(a.scale(2.0).coords(), &[6.0, 8.0]);
    }

    #[test]
    fn dimension_bounds() {
        assert!(Point::new(&[]).is_err());
        assert!(Point::new(&[0.0; 5]).is_err());
        assert_eq!(Point::new(&[0.0; 4]).unwrap().dim(), 4);
    }
}
