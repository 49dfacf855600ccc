//! Closed-form ambient curvature tensors of the four homogeneous nearly
//! Kähler spaces (type one), the symbolic shape operator and the cyclic sum
//! `g(R(X,Y)Z, SW) + g(R(Y,W)Z, SX) + g(R(W,X)Z, SY)`.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::linform::{LinForm, Unknown};
use crate::scalar::{Rational, Scalar};
use crate::tensor::{LinVec, Matrix, Metric, Vector, DIM};

/// Ambient space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Space {
    S6,
    S3xS3,
    CP3,
    FlagC3,
}

impl Space {
    pub const ALL: [Space; 4] = [Space::S6, Space::S3xS3, Space::CP3, Space::FlagC3];

    pub fn name(self) -> &'static str {
        match self {
            Space::S6 => "S6",
            Space::S3xS3 => "S3xS3",
            Space::CP3 => "CP3",
            Space::FlagC3 => "FlagC3",
        }
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Space {
    type Err = String;
    fn from_str(s: &str) -> Result<Space, String> {
        match s.to_ascii_lowercase().as_str() {
            "s6" => Ok(Space::S6),
            "s3xs3" => Ok(Space::S3xS3),
            "cp3" => Ok(Space::CP3),
            "flagc3" | "flag" | "fc3" => Ok(Space::FlagC3),
            _ => Err(format!("unknown space {s:?} (expected s6, s3xs3, cp3, flagc3)")),
        }
    }
}

/// Auxiliary tensors entering the curvature.
#[derive(Clone, Debug)]
pub enum Aux {
    None,
    /// Almost product structure of S3xS3.
    P(Matrix),
    /// Kähler structure of CP3.
    Jo(Matrix),
    /// `J_1, J_2, J_3` of the flag manifold.
    Flag([Matrix; 3]),
}

impl Aux {
    pub fn named(&self) -> Vec<(&'static str, &Matrix)> {
        match self {
            Aux::None => vec![],
            Aux::P(p) => vec![("P", p)],
            Aux::Jo(j) => vec![("Jo", j)],
            Aux::Flag([a, b, c]) => vec![("J1", a), ("J2", b), ("J3", c)],
        }
    }
}

/// Metric, almost complex structure and auxiliary tensors in some basis.
#[derive(Clone, Debug)]
pub struct Geometry {
    pub space: Space,
    pub metric: Metric,
    pub j: Matrix,
    pub aux: Aux,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurvatureError {
    #[error("{0} curvature needs auxiliary tensor {1}")]
    MissingAux(Space, &'static str),
    #[error("argument {0} has a normal component")]
    NotTangent(&'static str),
}

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

impl Geometry {
    fn g(&self, x: &Vector, y: &Vector) -> Scalar {
        self.metric.g(x, y)
    }

    /// `g(Y,Z)X - g(X,Z)Y`.
    fn basic(&self, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        x.scale(&self.g(y, z)).sub(&y.scale(&self.g(x, z)))
    }

    /// `g(AY,Z)AX - g(AX,Z)AY + 2g(X,AY)AZ`.
    fn kahler(&self, a: &Matrix, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        let (ax, ay, az) = (a.apply(x), a.apply(y), a.apply(z));
        let two = Rational::from_integer(2.into());
        ax.scale(&self.g(&ay, z))
            .sub(&ay.scale(&self.g(&ax, z)))
            .add(&az.scale(&self.g(x, &ay).scale(&two)))
    }

    /// `g(AY,Z)AX - g(AX,Z)AY`.
    fn pair_term(&self, a: &Matrix, x: &Vector, y: &Vector, z: &Vector) -> Vector {
        let (ax, ay) = (a.apply(x), a.apply(y));
        ax.scale(&self.g(&ay, z)).sub(&ay.scale(&self.g(&ax, z)))
    }

    /// Ambient curvature `R(X,Y)Z`.
    pub fn riemann(&self, x: &Vector, y: &Vector, z: &Vector) -> Result<Vector, CurvatureError> {
        let j = &self.j;
        match (self.space, &self.aux) {
            (Space::S6, _) => Ok(self.basic(x, y, z)),
            (Space::S3xS3, Aux::P(p)) => {
                let (jx, jy, jz) = (j.apply(x), j.apply(y), j.apply(z));
                let jterm = jx
                    .scale(&self.g(&jy, z))
                    .sub(&jy.scale(&self.g(&jx, z)))
                    .sub(&jz.scale(&self.g(&jx, y).scale(&q(2, 1))));
                let jp = j.compose(p);
                Ok(self
                    .basic(x, y, z)
                    .scale(&Scalar::rational(x.field(), q(5, 4)))
                    .add(&jterm.scale(&Scalar::rational(x.field(), q(1, 4))))
                    .add(&self.pair_term(p, x, y, z))
                    .add(&self.pair_term(&jp, x, y, z)))
            }
            (Space::CP3, Aux::Jo(jo)) => {
                let f = x.field();
                let jjo = j.compose(jo);
                let (jjx, jjy) = (jjo.apply(x), jjo.apply(y));
                let mixed = x
                    .scale(&self.g(&jjy, z))
                    .sub(&y.scale(&self.g(&jjx, z)))
                    .add(&jjx.scale(&self.g(y, z)))
                    .sub(&jjy.scale(&self.g(x, z)));
                Ok(self
                    .basic(x, y, z)
                    .scale(&Scalar::rational(f, q(5, 4)))
                    .sub(&self.kahler(j, x, y, z).scale(&Scalar::rational(f, q(1, 4))))
                    .add(&self.kahler(jo, x, y, z).scale(&Scalar::rational(f, q(1, 2))))
                    .add(&mixed.scale(&Scalar::rational(f, q(1, 2))))
                    .add(&self.pair_term(&jjo, x, y, z)))
            }
            (Space::FlagC3, Aux::Flag(js)) => {
                let f = x.field();
                let half = Scalar::rational(f, q(1, 2));
                let mut out = self
                    .basic(x, y, z)
                    .scale(&Scalar::rational(f, q(1, 4)))
                    .sub(&self.kahler(j, x, y, z).scale(&Scalar::rational(f, q(1, 4))));
                for ji in js {
                    out = out.add(&self.kahler(ji, x, y, z).scale(&half));
                }
                Ok(out)
            }
            (Space::S3xS3, _) => Err(CurvatureError::MissingAux(Space::S3xS3, "P")),
            (Space::CP3, _) => Err(CurvatureError::MissingAux(Space::CP3, "Jo")),
            (Space::FlagC3, _) => Err(CurvatureError::MissingAux(Space::FlagC3, "J1,J2,J3")),
        }
    }

    /// `g(R(X,Y)Z, W)`.
    pub fn riemann4(&self, x: &Vector, y: &Vector, z: &Vector, w: &Vector) -> Result<Scalar, CurvatureError> {
        Ok(self.g(&self.riemann(x, y, z)?, w))
    }
}

/// Shape operator with components `h(i,j) = g(S E_i, E_j)` on the tangent
/// frame `E_1..E_5`; `E_6` is the unit normal.
#[derive(Clone, Debug)]
pub struct ShapeOp {
    pub metric: Metric,
}

impl ShapeOp {
    pub fn new(metric: &Metric) -> ShapeOp {
        ShapeOp {
            metric: metric.clone(),
        }
    }

    /// `S W` as a vector of forms: component `j` is `sum_k w_k h(k,j) / |E_j|^2`.
    pub fn apply(&self, w: &Vector) -> LinVec {
        let f = w.field().clone();
        let mut out = LinVec::zero(&f);
        for j in 0..DIM - 1 {
            let inv = self.metric.norms[j]
                .recip()
                .expect("frame norms are units");
            let mut acc = LinForm::zero(&f);
            for k in 0..DIM - 1 {
                if !w.0[k].is_zero() {
                    acc = acc.add(&LinForm::term(Unknown::h(k + 1, j + 1), &w.0[k] * &inv));
                }
            }
            out.0[j] = acc;
        }
        out
    }

    /// `g(V, S W)`; the frame norms cancel.
    pub fn pairing(&self, v: &Vector, w: &Vector) -> LinForm {
        let f = v.field().clone();
        let mut acc = LinForm::zero(&f);
        for k in 0..DIM - 1 {
            if w.0[k].is_zero() {
                continue;
            }
            for j in 0..DIM - 1 {
                if v.0[j].is_zero() {
                    continue;
                }
                acc = acc.add(&LinForm::term(Unknown::h(k + 1, j + 1), &v.0[j] * &w.0[k]));
            }
        }
        acc
    }
}

fn tangent(v: &Vector, name: &'static str) -> Result<(), CurvatureError> {
    if v.0[DIM - 1].is_zero() {
        Ok(())
    } else {
        Err(CurvatureError::NotTangent(name))
    }
}

/// Cyclic sum over `(X, Y, W)` of `g(R(X,Y)Z, SW)`.
pub fn cyclic_sum(
    geom: &Geometry,
    shape: &ShapeOp,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    w: &Vector,
) -> Result<LinForm, CurvatureError> {
    tangent(x, "X")?;
    tangent(y, "Y")?;
    tangent(z, "Z")?;
    tangent(w, "W")?;
    let mut acc = shape.pairing(&geom.riemann(x, y, z)?, w);
    acc = acc.add(&shape.pairing(&geom.riemann(y, w, z)?, x));
    acc = acc.add(&shape.pairing(&geom.riemann(w, x, z)?, y));
    Ok(acc)
}

/// Same cyclic sum with `S` replaced by the identity.
pub fn cyclic_sum_identity(
    geom: &Geometry,
    x: &Vector,
    y: &Vector,
    z: &Vector,
    w: &Vector,
) -> Result<Scalar, CurvatureError> {
    Ok(&(&geom.riemann4(x, y, z, w)? + &geom.riemann4(y, w, z, x)?) + &geom.riemann4(w, x, z, y)?)
}

/// Sectional curvature of the plane `E_i ^ E_j` of a hypersurface of the
/// round six-sphere whose shape operator is diagonal with eigenvalues
/// `lambda_i, lambda_j`.
pub fn gauss_sectional(lambda_i: &Scalar, lambda_j: &Scalar) -> Scalar {
    &Scalar::one(lambda_i.field()) + &(lambda_i * lambda_j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Field;
    use std::sync::Arc;

    fn orthonormal(space: Space, j: Matrix, aux: Aux) -> Geometry {
        let f = j.field().clone();
        Geometry {
            space,
            metric: Metric::identity(&f),
            j,
            aux,
        }
    }

    // {JN, V1, V2, JV1, JV2, N}
    fn standard_j(f: &Arc<Field>) -> Matrix {
        Matrix::signed_permutation(f, [(-1, 5), (1, 3), (1, 4), (-1, 1), (-1, 2), (1, 0)])
    }

    #[test]
    fn sphere_has_unit_curvature() {
        let f = Field::empty();
        let g = orthonormal(Space::S6, standard_j(&f), Aux::None);
        let x = Vector::basis(&f, 1);
        let y = Vector::basis(&f, 2);
        assert_eq!(g.riemann(&x, &y, &y).unwrap(), x);
    }

    #[test]
    fn product_dependent_frame() {
        let f = Field::empty();
        // P fixes V1, JV2; negates V2, JV1; PN = N, P(JN) = -JN at angle zero
        let p = Matrix::signed_permutation(&f, [(-1, 0), (1, 1), (-1, 2), (-1, 3), (1, 4), (1, 5)]);
        let g = orthonormal(Space::S3xS3, standard_j(&f), Aux::P(p));
        let v1 = Vector::basis(&f, 1);
        let v2 = Vector::basis(&f, 2);
        // 5/4 from the round part, -1 from g(PV2,V2)PV1, J-terms vanish
        assert_eq!(g.riemann(&v1, &v2, &v2).unwrap(), v1.scale(&Scalar::frac(&f, 1, 4)));
    }

    #[test]
    fn flag_unit_vector_in_second_distribution() {
        let f = Field::empty();
        // {JN, U, JU, V, JV, N}, N in D1, U in D2, V in D3
        let j = standard_j_flag(&f);
        let on = |keep: [usize; 2]| {
            let mut m = j.neg();
            for &k in &keep {
                m.cols[k] = j.cols[k].clone();
            }
            m
        };
        let aux = Aux::Flag([on([0, 5]), on([1, 2]), on([3, 4])]);
        let g = orthonormal(Space::FlagC3, j.clone(), aux);
        let u = Vector::basis(&f, 1);
        let ju = Vector::basis(&f, 2);
        // 1/4 - 3/4 + 3 * (3/2): each Kähler-type term contributes 3U
        assert_eq!(g.riemann(&u, &ju, &ju).unwrap(), u.scale(&Scalar::int(&f, 4)));
    }

    fn standard_j_flag(f: &Arc<Field>) -> Matrix {
        Matrix::signed_permutation(f, [(-1, 5), (1, 2), (-1, 1), (1, 4), (-1, 3), (1, 0)])
    }

    #[test]
    fn missing_aux_is_rejected() {
        let f = Field::empty();
        let g = orthonormal(Space::CP3, standard_j(&f), Aux::None);
        let x = Vector::basis(&f, 1);
        assert_eq!(
            g.riemann(&x, &x, &x),
            Err(CurvatureError::MissingAux(Space::CP3, "Jo"))
        );
    }

    #[test]
    fn normal_argument_is_rejected() {
        let f = Field::empty();
        let g = orthonormal(Space::S6, standard_j(&f), Aux::None);
        let s = ShapeOp::new(&g.metric);
        let x = Vector::basis(&f, 1);
        let n = Vector::basis(&f, 5);
        assert_eq!(
            cyclic_sum(&g, &s, &x, &x, &x, &n),
            Err(CurvatureError::NotTangent("W"))
        );
    }

    #[test]
    fn equal_arguments_give_zero() {
        let f = Field::empty();
        let g = orthonormal(Space::S6, standard_j(&f), Aux::None);
        let s = ShapeOp::new(&g.metric);
        let x = Vector::from_ints(&f, [1, 2, 0, -1, 3, 0]);
        let z = Vector::basis(&f, 2);
        let w = Vector::basis(&f, 4);
        assert!(cyclic_sum(&g, &s, &x, &x, &z, &w).unwrap().is_zero());
    }

    #[test]
    fn sectional_examples() {
        let f = Field::empty();
        let z = Scalar::zero(&f);
        assert!(gauss_sectional(&z, &z).is_one());
        assert_eq!(gauss_sectional(&Scalar::int(&f, 2), &Scalar::int(&f, 3)), Scalar::int(&f, 7));
        let l = Scalar::frac(&f, 3, 4);
        assert_eq!(gauss_sectional(&l, &l), Scalar::frac(&f, 25, 16));
    }
}
