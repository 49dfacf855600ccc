//! Exact vectors and endomorphisms in a fixed six-element basis.

use std::fmt;
use std::sync::Arc;

use crate::linform::LinForm;
use crate::scalar::{Field, Scalar, Sym};

pub const DIM: usize = 6;

/// Coordinates with respect to a basis `E_1..E_6`.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector(pub Vec<Scalar>);

impl Vector {
    pub fn zero(field: &Arc<Field>) -> Vector {
        Vector(vec![Scalar::zero(field); DIM])
    }

    pub fn basis(field: &Arc<Field>, i: usize) -> Vector {
        let mut v = Vector::zero(field);
        v.0[i] = Scalar::one(field);
        v
    }

    pub fn from_ints(field: &Arc<Field>, xs: [i64; DIM]) -> Vector {
        Vector(xs.iter().map(|&x| Scalar::int(field, x)).collect())
    }

    pub fn field(&self) -> &Arc<Field> {
        self.0[0].field()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Scalar::is_zero)
    }

    pub fn add(&self, o: &Vector) -> Vector {
        Vector(self.0.iter().zip(&o.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, o: &Vector) -> Vector {
        Vector(self.0.iter().zip(&o.0).map(|(a, b)| a - b).collect())
    }

    pub fn neg(&self) -> Vector {
        Vector(self.0.iter().map(|a| -a).collect())
    }

    pub fn scale(&self, k: &Scalar) -> Vector {
        Vector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn rebase(&self, field: &Arc<Field>) -> Vector {
        Vector(self.0.iter().map(|a| a.rebase(field)).collect())
    }

    pub fn eval(&self, values: &dyn Fn(Sym) -> f64) -> [f64; DIM] {
        std::array::from_fn(|i| self.0[i].eval(values))
    }
}

/// Linear combination of `terms`.
pub fn combine(field: &Arc<Field>, terms: &[(Scalar, &Vector)]) -> Vector {
    terms
        .iter()
        .fold(Vector::zero(field), |acc, (k, v)| acc.add(&v.scale(k)))
}

/// Endomorphism stored by columns: `cols[j]` is the image of `E_j`.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    pub cols: Vec<Vector>,
}

impl Matrix {
    pub fn identity(field: &Arc<Field>) -> Matrix {
        Matrix {
            cols: (0..DIM).map(|j| Vector::basis(field, j)).collect(),
        }
    }

    pub fn zero(field: &Arc<Field>) -> Matrix {
        Matrix {
            cols: vec![Vector::zero(field); DIM],
        }
    }

    /// Builds a matrix from the images of the basis vectors.
    pub fn from_images(cols: Vec<Vector>) -> Matrix {
        assert_eq!(cols.len(), DIM);
        Matrix { cols }
    }

    /// Signed permutation: `E_j -> sign[j] * E_{target[j]}`.
    pub fn signed_permutation(field: &Arc<Field>, map: [(i64, usize); DIM]) -> Matrix {
        Matrix {
            cols: map
                .iter()
                .map(|&(s, t)| Vector::basis(field, t).scale(&Scalar::int(field, s)))
                .collect(),
        }
    }

    pub fn field(&self) -> &Arc<Field> {
        self.cols[0].field()
    }

    pub fn entry(&self, i: usize, j: usize) -> &Scalar {
        &self.cols[j].0[i]
    }

    pub fn apply(&self, v: &Vector) -> Vector {
        let f = v.field().clone();
        (0..DIM).fold(Vector::zero(&f), |acc, j| {
            if v.0[j].is_zero() {
                acc
            } else {
                acc.add(&self.cols[j].scale(&v.0[j]))
            }
        })
    }

    /// `self * other` (apply `other` first).
    pub fn compose(&self, other: &Matrix) -> Matrix {
        Matrix {
            cols: other.cols.iter().map(|c| self.apply(c)).collect(),
        }
    }

    pub fn add(&self, o: &Matrix) -> Matrix {
        Matrix {
            cols: self.cols.iter().zip(&o.cols).map(|(a, b)| a.add(b)).collect(),
        }
    }

    pub fn neg(&self) -> Matrix {
        Matrix {
            cols: self.cols.iter().map(Vector::neg).collect(),
        }
    }

    pub fn scale(&self, k: &Scalar) -> Matrix {
        Matrix {
            cols: self.cols.iter().map(|c| c.scale(k)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(Vector::is_zero)
    }

    pub fn rebase(&self, field: &Arc<Field>) -> Matrix {
        Matrix {
            cols: self.cols.iter().map(|c| c.rebase(field)).collect(),
        }
    }

    pub fn eval(&self, values: &dyn Fn(Sym) -> f64) -> [[f64; DIM]; DIM] {
        let mut out = [[0.0; DIM]; DIM];
        for j in 0..DIM {
            let c = self.cols[j].eval(values);
            for i in 0..DIM {
                out[i][j] = c[i];
            }
        }
        out
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..DIM {
            let row: Vec<String> = (0..DIM).map(|j| self.entry(i, j).to_string()).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Diagonal metric `g(E_i, E_j) = delta_ij * norms[i]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Metric {
    pub norms: Vec<Scalar>,
}

impl Metric {
    pub fn identity(field: &Arc<Field>) -> Metric {
        Metric {
            norms: vec![Scalar::one(field); DIM],
        }
    }

    pub fn g(&self, x: &Vector, y: &Vector) -> Scalar {
        let f = x.field().clone();
        (0..DIM).fold(Scalar::zero(&f), |acc, i| {
            if x.0[i].is_zero() || y.0[i].is_zero() {
                acc
            } else {
                &acc + &(&(&x.0[i] * &y.0[i]) * &self.norms[i])
            }
        })
    }

    /// `g(A E_i, E_j) + g(E_i, A E_j)` vanishes for all `i, j`.
    pub fn is_skew(&self, a: &Matrix) -> bool {
        let f = a.field().clone();
        (0..DIM).all(|i| {
            (0..DIM).all(|j| {
                let ei = Vector::basis(&f, i);
                let ej = Vector::basis(&f, j);
                (&self.g(&a.apply(&ei), &ej) + &self.g(&ei, &a.apply(&ej))).is_zero()
            })
        })
    }

    /// `g(A E_i, A E_j) = g(E_i, E_j)` for all `i, j`.
    pub fn is_isometry(&self, a: &Matrix) -> bool {
        let f = a.field().clone();
        (0..DIM).all(|i| {
            (0..DIM).all(|j| {
                let ei = Vector::basis(&f, i);
                let ej = Vector::basis(&f, j);
                self.g(&a.apply(&ei), &a.apply(&ej)) == self.g(&ei, &ej)
            })
        })
    }

    pub fn rebase(&self, field: &Arc<Field>) -> Metric {
        Metric {
            norms: self.norms.iter().map(|n| n.rebase(field)).collect(),
        }
    }
}

/// Vector whose components are affine forms in the unknowns.
#[derive(Clone, Debug)]
pub struct LinVec(pub Vec<LinForm>);

impl LinVec {
    pub fn zero(field: &Arc<Field>) -> LinVec {
        LinVec(vec![LinForm::zero(field); DIM])
    }

    pub fn from_vector(v: &Vector) -> LinVec {
        LinVec(v.0.iter().map(|c| LinForm::constant(c.clone())).collect())
    }

    pub fn add(&self, o: &LinVec) -> LinVec {
        LinVec(self.0.iter().zip(&o.0).map(|(a, b)| a.add(b)).collect())
    }

    pub fn sub(&self, o: &LinVec) -> LinVec {
        LinVec(self.0.iter().zip(&o.0).map(|(a, b)| a.sub(b)).collect())
    }

    pub fn scale(&self, k: &Scalar) -> LinVec {
        LinVec(self.0.iter().map(|a| a.scale(k)).collect())
    }

    /// `form * v` for a constant vector `v`.
    pub fn outer(form: &LinForm, v: &Vector) -> LinVec {
        LinVec(v.0.iter().map(|c| form.scale(c)).collect())
    }

    /// `A` applied to a vector of forms (A has scalar entries).
    pub fn apply(a: &Matrix, v: &LinVec) -> LinVec {
        let f = a.field().clone();
        (0..DIM).fold(LinVec::zero(&f), |acc, j| acc.add(&LinVec::outer(&v.0[j], &a.cols[j])))
    }

    /// `g(self, w)` with `w` constant.
    pub fn pair(&self, metric: &Metric, w: &Vector) -> LinForm {
        let f = w.field().clone();
        (0..DIM).fold(LinForm::zero(&f), |acc, i| {
            acc.add(&self.0[i].scale(&(&w.0[i] * &metric.norms[i])))
        })
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(LinForm::is_zero)
    }
}
