//! Graded homomorphisms between semi-free modules and the Hom complex.
//!
//! A map of degree `p` is determined by its values on the semi-basis and
//! extended by `f(γx) = (-1)^{p|γ|} γ f(x)`. The Hom differential is
//! `D(f) = ∂'f - (-1)^p f∂`.

use thiserror::Error;

use crate::linalg::{determinant, is_invertible, solve_linear};
use crate::matrix::RMatrix;
use crate::module::{BlockModule, SemiFreeModule, Vector};
use crate::par::{map_range, Execution};
use crate::ring::{odd, TruncatedRing};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomError {
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("malformed homomorphism: {0}")]
    Shape(String),
    #[error("map of degree {degree} is not a cycle: D(f) is nonzero on generator {generator}")]
    NotACycle { degree: i64, generator: usize },
    #[error("cycle of degree {degree} is not null-homotopic")]
    NotNullHomotopic { degree: i64 },
}

/// A homogeneous map of degree `p` given by `values[g] ∈ target_{|g|+p}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GradedMap<R: TruncatedRing> {
    pub degree: i64,
    pub values: Vec<Vector<R>>,
}

impl<R: TruncatedRing> GradedMap<R> {
    pub fn zero(source: &SemiFreeModule<R>, target: &SemiFreeModule<R>, p: i64) -> Self {
        let values = source
            .degrees()
            .iter()
            .map(|&d| target.layout().zero_vector(d + p))
            .collect();
        Self { degree: p, values }
    }

    pub fn is_zero(&self, ring: &R) -> bool {
        self.values.iter().flatten().all(|x| ring.is_zero(x))
    }

    pub fn check_shape(&self, source: &SemiFreeModule<R>, target: &SemiFreeModule<R>) -> Result<(), HomError> {
        if source.algebra() != target.algebra() {
            return Err(HomError::AlgebraMismatch);
        }
        if self.values.len() != source.generator_count() {
            return Err(HomError::Shape(format!(
                "{} values for {} generators",
                self.values.len(),
                source.generator_count()
            )));
        }
        for (g, v) in self.values.iter().enumerate() {
            let expected = target.rank(source.layout().degree(g) + self.degree);
            if v.len() != expected {
                return Err(HomError::Shape(format!(
                    "value on generator {g} has {} coordinates, expected {expected}",
                    v.len()
                )));
            }
        }
        Ok(())
    }

    /// `f(x)` for `x ∈ source_d`.
    pub fn apply(&self, source: &SemiFreeModule<R>, target: &SemiFreeModule<R>, d: i64, x: &[R::Elem]) -> Vector<R> {
        source
            .layout()
            .apply_linear(&self.values, target.layout(), self.degree, d, x)
    }

    /// The `R`-matrix of `f` on `source_d`.
    pub fn matrix(&self, source: &SemiFreeModule<R>, target: &SemiFreeModule<R>, d: i64) -> RMatrix<R> {
        source
            .layout()
            .linear_matrix(&self.values, target.layout(), self.degree, d)
    }

    pub fn scale(&self, ring: &R, c: &R::Elem) -> Self {
        Self {
            degree: self.degree,
            values: self
                .values
                .iter()
                .map(|v| v.iter().map(|x| ring.mul(c, x)).collect())
                .collect(),
        }
    }

    pub fn add(&self, ring: &R, other: &Self) -> Self {
        assert_eq!(self.degree, other.degree);
        Self {
            degree: self.degree,
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.iter().zip(b).map(|(x, y)| ring.add(x, y)).collect())
                .collect(),
        }
    }

    pub fn sub(&self, ring: &R, other: &Self) -> Self {
        self.add(ring, &other.scale(ring, &ring.neg(&ring.one())))
    }

    /// Concatenated values, the coordinates in [`HomSlice`].
    pub fn params(&self) -> Vector<R> {
        self.values.iter().flatten().cloned().collect()
    }
}

pub fn identity<R: TruncatedRing>(m: &SemiFreeModule<R>) -> GradedMap<R> {
    GradedMap {
        degree: 0,
        values: (0..m.generator_count())
            .map(|g| m.layout().generator_vector(g))
            .collect(),
    }
}

/// `g ∘ f`.
pub fn compose<R: TruncatedRing>(
    g: &GradedMap<R>,
    f: &GradedMap<R>,
    source: &SemiFreeModule<R>,
    middle: &SemiFreeModule<R>,
    target: &SemiFreeModule<R>,
) -> GradedMap<R> {
    let values = f
        .values
        .iter()
        .enumerate()
        .map(|(b, v)| g.apply(middle, target, source.layout().degree(b) + f.degree, v))
        .collect();
    GradedMap {
        degree: f.degree + g.degree,
        values,
    }
}

/// `D(f) = ∂'f - (-1)^p f∂`, of degree `p - 1`.
pub fn hom_differential<R: TruncatedRing>(
    f: &GradedMap<R>,
    source: &SemiFreeModule<R>,
    target: &SemiFreeModule<R>,
) -> GradedMap<R> {
    let ring = source.ring();
    let p = f.degree;
    let values = (0..source.generator_count())
        .map(|g| {
            let d = source.layout().degree(g);
            let mut out = target.apply_differential(d + p, &f.values[g]);
            let back = f.apply(source, target, d - 1, source.value(g));
            for (o, x) in out.iter_mut().zip(&back) {
                *o = if odd(p) { ring.add(o, x) } else { ring.sub(o, x) };
            }
            out
        })
        .collect();
    GradedMap { degree: p - 1, values }
}

pub fn is_cycle<R: TruncatedRing>(f: &GradedMap<R>, source: &SemiFreeModule<R>, target: &SemiFreeModule<R>) -> bool {
    first_nonzero(&hom_differential(f, source, target), source.ring()).is_none()
}

fn first_nonzero<R: TruncatedRing>(f: &GradedMap<R>, ring: &R) -> Option<usize> {
    f.values.iter().position(|v| v.iter().any(|x| !ring.is_zero(x)))
}

/// One degree of `Hom(source, target)` in coordinates.
///
/// The parameters of a degree-`p` map are the coordinates of its values,
/// generator by generator; `differential` sends them to parameters of degree `p - 1`.
#[derive(Debug, Clone)]
pub struct HomSlice<R: TruncatedRing> {
    pub degree: i64,
    /// `offsets[g]..offsets[g + 1]` are the coordinates of the value on generator `g`.
    pub offsets: Vec<usize>,
    pub differential: RMatrix<R>,
}

impl<R: TruncatedRing> HomSlice<R> {
    pub fn parameter_count(&self) -> usize {
        *self.offsets.last().unwrap_or(&0)
    }

    pub fn to_map(&self, params: &[R::Elem]) -> GradedMap<R> {
        GradedMap {
            degree: self.degree,
            values: self.offsets.windows(2).map(|w| params[w[0]..w[1]].to_vec()).collect(),
        }
    }
}

fn offsets<R: TruncatedRing>(source: &SemiFreeModule<R>, target: &SemiFreeModule<R>, p: i64) -> Vec<usize> {
    let mut out = vec![0];
    for &d in source.degrees() {
        out.push(out.last().unwrap() + target.rank(d + p));
    }
    out
}

/// Assembles the degree-`p` slice of `Hom(source, target)`, one column per parameter.
pub fn hom_slice<R: TruncatedRing>(
    source: &SemiFreeModule<R>,
    target: &SemiFreeModule<R>,
    p: i64,
    exec: Execution,
) -> Result<HomSlice<R>, HomError> {
    if source.algebra() != target.algebra() {
        return Err(HomError::AlgebraMismatch);
    }
    let ring = source.ring();
    let offs = offsets(source, target, p);
    let below = offsets(source, target, p - 1);
    let n = *offs.last().unwrap();
    let zero = GradedMap::zero(source, target, p);
    let columns = map_range(exec, n, |k| {
        let g = offs.partition_point(|&o| o <= k) - 1;
        let mut f = zero.clone();
        f.values[g][k - offs[g]] = ring.one();
        hom_differential(&f, source, target).params()
    });
    Ok(HomSlice {
        degree: p,
        offsets: offs,
        differential: RMatrix::from_columns(ring, *below.last().unwrap(), &columns),
    })
}

/// Finds `S` of degree `|f| + 1` with `D(S) = f`, free parameters set to zero.
pub fn null_homotopy<R: TruncatedRing>(
    f: &GradedMap<R>,
    source: &SemiFreeModule<R>,
    target: &SemiFreeModule<R>,
    exec: Execution,
) -> Result<GradedMap<R>, HomError> {
    f.check_shape(source, target)?;
    let ring = source.ring();
    if let Some(g) = first_nonzero(&hom_differential(f, source, target), ring) {
        return Err(HomError::NotACycle {
            degree: f.degree,
            generator: g,
        });
    }
    let slice = hom_slice(source, target, f.degree + 1, exec)?;
    match solve_linear(&slice.differential, &f.params()).expect("slice shapes agree") {
        Some(s) => Ok(slice.to_map(&s)),
        None => Err(HomError::NotNullHomotopic { degree: f.degree }),
    }
}

/// Whether a degree-0 map is a chain map with every component invertible.
pub fn is_isomorphism<R: TruncatedRing>(
    f: &GradedMap<R>,
    source: &SemiFreeModule<R>,
    target: &SemiFreeModule<R>,
) -> bool {
    if f.degree != 0 || f.check_shape(source, target).is_err() || !is_cycle(f, source, target) {
        return false;
    }
    component_degrees(source, target).all(|d| is_invertible(&f.matrix(source, target, d)))
}

/// Degrees where either module is nonzero.
pub fn component_degrees<R: TruncatedRing>(
    source: &SemiFreeModule<R>,
    target: &SemiFreeModule<R>,
) -> impl Iterator<Item = i64> {
    let s = source.layout().support();
    let t = target.layout().support();
    let lo = [s, t].iter().flatten().map(|x| x.0).min().unwrap_or(0);
    let hi = [s, t].iter().flatten().map(|x| x.1).max().unwrap_or(-1);
    lo..=hi
}

/// Whether every component determinant is a unit; an independent check
/// of invertibility by cofactor expansion.
pub fn has_unit_determinants<R: TruncatedRing>(
    f: &GradedMap<R>,
    source: &SemiFreeModule<R>,
    target: &SemiFreeModule<R>,
) -> bool {
    let ring = source.ring();
    component_degrees(source, target).all(|d| {
        let m = f.matrix(source, target, d);
        m.is_square() && (m.rows() == 0 || determinant(&m).map(|x| ring.is_unit(&x)).unwrap_or(false))
    })
}

/// `B ⊗_A f` for an `A`-linear map `f : M -> M'`: values `[0; f(b)]`.
pub fn base_change_hom<R: TruncatedRing>(
    f: &GradedMap<R>,
    source: &BlockModule<R>,
    target: &BlockModule<R>,
) -> GradedMap<R> {
    let values = f
        .values
        .iter()
        .enumerate()
        .map(|(g, v)| {
            let d = source.layout().degree(g) + f.degree;
            target.to_total(d, &target.layout().zero_vector(d - 1), v)
        })
        .collect();
    GradedMap {
        degree: f.degree,
        values,
    }
}

/// The pieces `(z, v)` of a `B`-linear map `S` with `S(e_b) = [v(b); z(b)]`.
///
/// On `N_i = M_{i-1} ⊕ M_i` the map is `[[(-1)^p z, v], [0, z]]`, with `z`
/// an `A`-linear map of degree `p` and `v` one of degree `p - 1`.
pub fn block_pieces<R: TruncatedRing>(
    s: &GradedMap<R>,
    source: &BlockModule<R>,
    target: &BlockModule<R>,
) -> (GradedMap<R>, GradedMap<R>) {
    let mut z = Vec::new();
    let mut v = Vec::new();
    for (g, x) in s.values.iter().enumerate() {
        let (top, bottom) = target.from_total(source.layout().degree(g) + s.degree, x);
        v.push(top);
        z.push(bottom);
    }
    (
        GradedMap {
            degree: s.degree,
            values: z,
        },
        GradedMap {
            degree: s.degree - 1,
            values: v,
        },
    )
}

/// Inverse of [`block_pieces`].
pub fn from_block_pieces<R: TruncatedRing>(
    z: &GradedMap<R>,
    v: &GradedMap<R>,
    source: &BlockModule<R>,
    target: &BlockModule<R>,
) -> GradedMap<R> {
    let values = z
        .values
        .iter()
        .zip(&v.values)
        .enumerate()
        .map(|(g, (zb, vb))| target.to_total(source.layout().degree(g) + z.degree, vb, zb))
        .collect();
    GradedMap {
        degree: z.degree,
        values,
    }
}
