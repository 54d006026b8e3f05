//! Vanishing of `Ext` through the Hom complex, and the homothety check.

use serde_json::{json, Value};

use crate::hom::{hom_slice, GradedMap, HomError};
use crate::linalg::{in_column_span, kernel_generators};
use crate::matrix::RMatrix;
use crate::module::{RComplex, SemiFreeModule};
use crate::par::{map_range, Execution};
use crate::ring::TruncatedRing;

#[derive(Debug, Clone, PartialEq)]
pub enum ExtStatus<R: TruncatedRing> {
    Zero,
    /// A cycle of degree `-i` that is not a boundary.
    Nonzero(GradedMap<R>),
    Inconclusive(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExtReport<R: TruncatedRing> {
    pub degree: i64,
    pub status: ExtStatus<R>,
    pub window: Option<(i64, i64)>,
}

impl<R: TruncatedRing> ExtReport<R> {
    pub fn is_zero(&self) -> bool {
        matches!(self.status, ExtStatus::Zero)
    }

    pub fn to_json(&self, ring: &R) -> Value {
        let (status, witness) = match &self.status {
            ExtStatus::Zero => ("zero", Value::Null),
            ExtStatus::Nonzero(f) => (
                "nonzero",
                json!({
                    "degree": f.degree,
                    "values": f.values.iter()
                        .map(|v| v.iter().map(|x| ring.elem_to_json(x)).collect::<Vec<_>>())
                        .collect::<Vec<_>>(),
                }),
            ),
            ExtStatus::Inconclusive(reason) => ("inconclusive", json!({ "reason": reason })),
        };
        json!({
            "status": status,
            "witness": witness,
            "window": self.window.map(|(lo, hi)| json!([lo, hi])),
        })
    }
}

/// Decides whether `Ext^i(source, target) = H_{-i}(Hom(source, target))` vanishes.
///
/// `source` must be semi-free (a resolution of the first argument). When it is
/// a truncation complete through `c`, or `window = (lo, hi)` caps the trusted
/// generator degrees at `hi`, the answer is certified only if that bound
/// reaches `top(target) + i + 1`; otherwise the result is inconclusive.
pub fn ext_is_zero<R: TruncatedRing>(
    i: i64,
    source: &SemiFreeModule<R>,
    target: &SemiFreeModule<R>,
    window: Option<(i64, i64)>,
    exec: Execution,
) -> Result<ExtReport<R>, HomError> {
    let report = |status| ExtReport {
        degree: i,
        status,
        window,
    };
    if target.complete_through().is_some() {
        return Ok(report(ExtStatus::Inconclusive("target is a truncation".into())));
    }
    let Some((_, top)) = target.layout().support() else {
        return Ok(report(ExtStatus::Zero));
    };
    let trusted = [source.complete_through(), window.map(|w| w.1)]
        .into_iter()
        .flatten()
        .min();
    if let Some(c) = trusted {
        if c < top + i + 1 {
            return Ok(report(ExtStatus::Inconclusive(format!(
                "source known through degree {c}, need {}",
                top + i + 1
            ))));
        }
    }
    let here = hom_slice(source, target, -i, exec)?;
    let above = hom_slice(source, target, -i + 1, exec)?;
    for z in kernel_generators(&here.differential) {
        if !in_column_span(&above.differential, &z) {
            return Ok(report(ExtStatus::Nonzero(here.to_map(&z))));
        }
    }
    Ok(report(ExtStatus::Zero))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HomothetyStatus {
    Semidualizing,
    /// The mapping cone has homology in `degree` with these invariant factors.
    No {
        degree: i64,
        invariants: Vec<usize>,
    },
    Inconclusive(String),
}

/// Whether the homothety `A -> Hom_A(M, M)`, `a ↦ (m ↦ am)`, is a quasi-isomorphism.
///
/// Tested through the mapping cone `C_p = A_{p-1} ⊕ Hom_p`, which must be
/// acyclic in every degree of `window` (all degrees by default).
pub fn homothety_check<R: TruncatedRing>(
    m: &SemiFreeModule<R>,
    window: Option<(i64, i64)>,
    exec: Execution,
) -> Result<HomothetyStatus, HomError> {
    if m.complete_through().is_some() {
        return Ok(HomothetyStatus::Inconclusive("module is a truncation".into()));
    }
    let a = m.algebra().clone();
    let ring = m.ring().clone();
    let Some((lo, hi)) = m.layout().support() else {
        // Hom(0, 0) = 0, so the cone is A shifted; acyclic only when A is
        return Ok(match (0..=a.top_degree()).find(|&d| a.rank(d) > 0) {
            Some(d) => HomothetyStatus::No {
                degree: d + 1,
                invariants: vec![],
            },
            None => HomothetyStatus::Semidualizing,
        });
    };
    let g_lo = *m.degrees().iter().min().unwrap();
    let g_hi = *m.degrees().iter().max().unwrap();
    // Hom_p is nonzero only for lo - g_hi <= p <= hi - g_lo
    let p_lo = (lo - g_hi).min(0);
    let p_hi = (hi - g_lo).max(a.top_degree()) + 1;
    let degrees: Vec<i64> = (p_lo..=p_hi + 1).collect();
    let slices = map_range(exec, degrees.len(), |k| {
        hom_slice(m, m, degrees[k], Execution::Sequential)
    });
    let slices = slices.into_iter().collect::<Result<Vec<_>, _>>()?;
    // X(γ) for each basis element γ of A_p, as parameters of Hom_p
    let homothety = |p: i64| -> RMatrix<R> {
        let idx = (p - p_lo) as usize;
        let cols: Vec<Vec<R::Elem>> = (0..a.rank(p))
            .map(|s| {
                let gamma = a.global(p, s);
                let values: Vec<Vec<R::Elem>> = (0..m.generator_count())
                    .map(|g| {
                        m.layout()
                            .act(gamma, m.layout().degree(g), &m.layout().generator_vector(g))
                    })
                    .collect();
                GradedMap::<R> { degree: p, values }.params()
            })
            .collect();
        RMatrix::from_columns(&ring, slices[idx].parameter_count(), &cols)
    };
    let rank = |p: i64| -> usize {
        let h = if p >= p_lo && p <= p_hi + 1 {
            slices[(p - p_lo) as usize].parameter_count()
        } else {
            0
        };
        a.rank(p - 1) + h
    };
    // ∂(a, f) = (-∂a, X(a) + D f)
    let cone_differential = |p: i64| -> RMatrix<R> {
        let (ra1, ra2) = (a.rank(p - 1), a.rank(p - 2));
        let mut out = RMatrix::zeros(&ring, rank(p - 1), rank(p));
        if ra1 > 0 && ra2 > 0 {
            out.paste(0, 0, &a.differential(p - 1).neg());
        }
        if ra1 > 0 {
            out.paste(ra2, 0, &homothety(p - 1));
        }
        let idx = (p - p_lo) as usize;
        if p > p_lo && p <= p_hi + 1 && rank(p) > ra1 {
            out.paste(ra2, ra1, &slices[idx].differential);
        }
        out
    };
    let ranks: Vec<usize> = (p_lo..=p_hi).map(rank).collect();
    let diffs: Vec<RMatrix<R>> = (p_lo..=p_hi)
        .map(|p| {
            if p == p_lo {
                RMatrix::zeros(&ring, 0, rank(p))
            } else {
                cone_differential(p)
            }
        })
        .collect();
    let cone = RComplex::free(&ring, p_lo, ranks, diffs).expect("cone shapes agree");
    let (w_lo, w_hi) = window.unwrap_or((p_lo, p_hi));
    for d in w_lo.max(p_lo)..=w_hi.min(p_hi) {
        let h = cone.homology_at(d);
        if !h.is_empty() {
            return Ok(HomothetyStatus::No {
                degree: d,
                invariants: h,
            });
        }
    }
    Ok(HomothetyStatus::Semidualizing)
}
