//! Projections onto the constraint sets: the scalar projection `t₀u` onto
//! `{u ≠ 0 : ⟨I′(u),u⟩ = 0}` and the pair projection `s₀u⁺ + t₀u⁻` onto its
//! sign-changing refinement `{u : u± ≠ 0, ⟨I′(u),u±⟩ = 0}`.
//!
//! Both are derivative-free: the scalar projection brackets a sign change of
//! the ray pairing and bisects; the pair projection first grows a box on
//! whose corners the two pairings have the required signs, then runs a nested
//! bisection (inner in `s`, outer in `t`) that mirrors the two-dimensional
//! intermediate-value argument constructively.
//!
//! Tolerances are scale-aware: a pairing whose terms reach `1e12` cannot be
//! driven below an absolute `1e-10` in f64, so the bisections run to interval
//! collapse and accept when the residual is within `tol` **relative** to the
//! magnitude of the participating terms. Reported residuals are normalized
//! the same way; on desk-scale inputs they are far below `tol` in absolute
//! terms as well.

use serde::Serialize;
use thiserror::Error;

use crate::energy::{interior_integrals, EnergyError, ModelParams};
use crate::graph::{cross_terms, sobolev_norm_sq, Domain, GraphFunction, WeightedGraph};

/// Hard cap on dyadic bracket expansion.
const MAX_EXPANSION_EXP: i32 = 60;
/// Dyadic box-growth cap for the pair projection.
const MAX_BOX_EXP: i32 = 40;
/// Bisection iteration cap per root.
const MAX_BISECT: u32 = 200;

#[derive(Debug, Error)]
pub enum ProjectionError {
    #[error("cannot project the zero function")]
    ZeroFunction,
    #[error("pair projection requires both sign parts to be nonzero")]
    MissingSignPart,
    #[error("bracket expansion diverged beyond 2^{0} while searching for a sign change")]
    Diverged(i32),
    #[error("no sign box found up to scale 2^±{exp} (last box tried: [{alpha}, {beta}])")]
    BoxNotFound { exp: i32, alpha: f64, beta: f64 },
    #[error("bisection stalled with residual {residual} above tolerance {tol}")]
    ToleranceNotMet { residual: f64, tol: f64 },
    #[error(transparent)]
    Energy(#[from] EnergyError),
}

/// Result of projecting a ray onto the scalar constraint set.
#[derive(Debug, Clone, Serialize)]
pub struct ScalarProjection {
    /// The unique positive scale with `t₀·u` on the constraint set.
    pub t0: f64,
    /// `|⟨I′(t₀u), t₀u⟩|`, normalized by the magnitude of the pairing's
    /// terms at `t₀`; at most the configured tolerance.
    pub residual_f: f64,
    /// Sign-change bracket that contained `t₀` before bisection.
    pub bracket: (f64, f64),
    pub iterations: u32,
}

/// Result of projecting the sign parts onto the nodal constraint set.
#[derive(Debug, Clone, Serialize)]
pub struct PairProjection {
    pub s0: f64,
    pub t0: f64,
    /// `|⟨I′(s₀u⁺+t₀u⁻), s₀u⁺⟩|`, scale-normalized like
    /// [`ScalarProjection::residual_f`].
    pub residual_g: f64,
    /// `|⟨I′(s₀u⁺+t₀u⁻), t₀u⁻⟩|`, scale-normalized.
    pub residual_h: f64,
    /// The sign box `[α, β]` the nested bisection ran on.
    pub box_bounds: (f64, f64),
    pub iterations: u32,
}

/// Precomputed scalar invariants of one ray `t ↦ tu`, supporting O(1)
/// evaluation of the pairing `f(t) = ⟨I′(tu), tu⟩`:
///
/// ```text
/// f(t) = a t²‖u‖² + b t⁴‖u‖⁴ + λ t^(2k/m) ∫g|u|^(2k/m)
///        − t^p ∫Q|u|^p ln|u|^r − t^p ln(t^r) ∫Q|u|^p
/// ```
pub struct RayPairing {
    a: f64,
    b: f64,
    lambda: f64,
    p: f64,
    r: f64,
    ratio: f64,
    norm_sq: f64,
    potential: f64,
    log_p: f64,
    plain_p: f64,
}

impl RayPairing {
    pub fn new(
        graph: &WeightedGraph,
        dom: &Domain,
        params: &ModelParams,
        u: &GraphFunction,
    ) -> Result<Self, ProjectionError> {
        params.validate(dom)?;
        if u.is_zero() {
            return Err(ProjectionError::ZeroFunction);
        }
        let norm_sq = sobolev_norm_sq(graph, dom, u).map_err(EnergyError::from)?;
        let ints = interior_integrals(graph, dom, params, u)?;
        Ok(RayPairing {
            a: params.a,
            b: params.b,
            lambda: params.lambda,
            p: params.p,
            r: params.r,
            ratio: params.power_ratio(),
            norm_sq,
            potential: ints.potential,
            log_p: ints.log_p,
            plain_p: ints.plain_p,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        let tp = t.powf(self.p);
        self.a * t * t * self.norm_sq
            + self.b * t.powi(4) * self.norm_sq * self.norm_sq
            + self.lambda * t.powf(self.ratio) * self.potential
            - tp * self.log_p
            - tp * self.r * t.ln() * self.plain_p
    }

    /// Magnitude of the pairing's terms at `t`: the scale on which roundoff
    /// of `eval` lives.
    pub fn term_scale(&self, t: f64) -> f64 {
        let tp = t.powf(self.p);
        (self.a * t * t * self.norm_sq).abs()
            + (self.b * t.powi(4) * self.norm_sq * self.norm_sq).abs()
            + (self.lambda * t.powf(self.ratio) * self.potential).abs()
            + (tp * self.log_p).abs()
            + (tp * self.r * t.ln() * self.plain_p).abs()
    }
}

/// `⟨I′(tu), tu⟩` for a single scale; see [`RayPairing`] for the expansion.
pub fn ray_pairing(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
    t: f64,
) -> Result<f64, ProjectionError> {
    Ok(RayPairing::new(graph, dom, params, u)?.eval(t))
}

/// Brackets a sign change of `f` by dyadic expansion from `t = 1`, then
/// bisects to interval collapse. `f` must be positive for small arguments
/// and negative for large ones. `rel` maps `(t, f(t))` to the
/// scale-normalized residual; the root is accepted when it is within `tol`.
fn bisect_ray(
    f: &dyn Fn(f64) -> f64,
    rel: &dyn Fn(f64, f64) -> f64,
    tol: f64,
) -> Result<(f64, f64, (f64, f64), u32), ProjectionError> {
    let target = 1e-3 * tol;
    let mut iterations = 0u32;
    let f1 = f(1.0);
    if rel(1.0, f1) <= target {
        return Ok((1.0, rel(1.0, f1), (0.5, 2.0), 0));
    }
    let (mut lo, mut hi) = if f1 > 0.0 {
        let mut hi = 2.0;
        let mut exp = 1;
        while f(hi) >= 0.0 {
            exp += 1;
            if exp > MAX_EXPANSION_EXP {
                return Err(ProjectionError::Diverged(MAX_EXPANSION_EXP));
            }
            hi *= 2.0;
            iterations += 1;
        }
        (hi / 2.0, hi)
    } else {
        let mut lo = 0.5;
        let mut exp = 1;
        while f(lo) <= 0.0 {
            exp += 1;
            if exp > MAX_EXPANSION_EXP {
                return Err(ProjectionError::Diverged(MAX_EXPANSION_EXP));
            }
            lo *= 0.5;
            iterations += 1;
        }
        (lo, lo * 2.0)
    };
    let bracket = (lo, hi);
    let mut mid = 0.5 * (lo + hi);
    let mut fmid = f(mid);
    for _ in 0..MAX_BISECT {
        iterations += 1;
        if rel(mid, fmid) <= target || (hi - lo) <= 2.0 * f64::EPSILON * mid {
            break;
        }
        if fmid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
        fmid = f(mid);
    }
    let residual = rel(mid, fmid);
    if residual > tol {
        return Err(ProjectionError::ToleranceNotMet {
            residual,
            tol,
        });
    }
    Ok((mid, residual, bracket, iterations))
}

/// Finds the unique `t₀ > 0` with `t₀·u` on the scalar constraint set.
pub fn scalar_project(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
    tol: f64,
) -> Result<ScalarProjection, ProjectionError> {
    let ray = RayPairing::new(graph, dom, params, u)?;
    let (t0, residual_f, bracket, iterations) = bisect_ray(
        &|t| ray.eval(t),
        &|t, v| v.abs() / (1.0 + ray.term_scale(t)),
        tol,
    )?;
    Ok(ScalarProjection {
        t0,
        residual_f,
        bracket,
        iterations,
    })
}

/// Precomputed scalar invariants of the two-parameter family
/// `(s,t) ↦ su⁺ + tu⁻`, supporting O(1) evaluation of both pairings
/// `⟨I′(su⁺+tu⁻), su⁺⟩` and `⟨I′(su⁺+tu⁻), tu⁻⟩`.
pub struct SplitPairing {
    a: f64,
    b: f64,
    lambda: f64,
    p: f64,
    r: f64,
    ratio: f64,
    norm_pos: f64,
    norm_neg: f64,
    cross_sum: f64,
    cross_sq: f64,
    cross_prod: f64,
    potential_pos: f64,
    potential_neg: f64,
    log_pos: f64,
    log_neg: f64,
    plain_pos: f64,
    plain_neg: f64,
}

impl SplitPairing {
    pub fn new(
        graph: &WeightedGraph,
        dom: &Domain,
        params: &ModelParams,
        u: &GraphFunction,
    ) -> Result<Self, ProjectionError> {
        params.validate(dom)?;
        let pos = u.pos_part();
        let neg = u.neg_part();
        if pos.is_zero() || neg.is_zero() {
            return Err(ProjectionError::MissingSignPart);
        }
        let ct = cross_terms(graph, dom, u).map_err(EnergyError::from)?;
        let ints_pos = interior_integrals(graph, dom, params, &pos)?;
        let ints_neg = interior_integrals(graph, dom, params, &neg)?;
        Ok(SplitPairing {
            a: params.a,
            b: params.b,
            lambda: params.lambda,
            p: params.p,
            r: params.r,
            ratio: params.power_ratio(),
            norm_pos: sobolev_norm_sq(graph, dom, &pos).map_err(EnergyError::from)?,
            norm_neg: sobolev_norm_sq(graph, dom, &neg).map_err(EnergyError::from)?,
            cross_sum: ct.sum(),
            cross_sq: ct.square_sum(),
            cross_prod: ct.product(),
            potential_pos: ints_pos.potential,
            potential_neg: ints_neg.potential,
            log_pos: ints_pos.log_p,
            log_neg: ints_neg.log_p,
            plain_pos: ints_pos.plain_p,
            plain_neg: ints_neg.plain_p,
        })
    }

    /// Terms shared by both pairings: the `b`-coupling and cross-term block.
    fn coupling(&self, s: f64, t: f64) -> f64 {
        let st = s * t;
        let s2t2 = st * st;
        -0.5 * self.a * st * self.cross_sum
            + 0.5 * self.b * s2t2 * self.cross_sq
            + self.b * s2t2 * self.norm_pos * self.norm_neg
            + self.b * s2t2 * self.cross_prod
    }

    /// `⟨I′(su⁺+tu⁻), su⁺⟩`
    pub fn positive(&self, s: f64, t: f64) -> f64 {
        let sp = s.powf(self.p);
        self.a * s * s * self.norm_pos
            + self.b * s.powi(4) * self.norm_pos * self.norm_pos
            + self.lambda * s.powf(self.ratio) * self.potential_pos
            - sp * self.log_pos
            - sp * self.r * s.ln() * self.plain_pos
            + self.coupling(s, t)
            - 1.5 * self.b * s.powi(3) * t * self.norm_pos * self.cross_sum
            - 0.5 * self.b * s * t.powi(3) * self.norm_neg * self.cross_sum
    }

    /// `⟨I′(su⁺+tu⁻), tu⁻⟩`
    pub fn negative(&self, s: f64, t: f64) -> f64 {
        let tp = t.powf(self.p);
        self.a * t * t * self.norm_neg
            + self.b * t.powi(4) * self.norm_neg * self.norm_neg
            + self.lambda * t.powf(self.ratio) * self.potential_neg
            - tp * self.log_neg
            - tp * self.r * t.ln() * self.plain_neg
            + self.coupling(s, t)
            - 1.5 * self.b * s * t.powi(3) * self.norm_neg * self.cross_sum
            - 0.5 * self.b * s.powi(3) * t * self.norm_pos * self.cross_sum
    }

    fn coupling_scale(&self, s: f64, t: f64) -> f64 {
        let st = s * t;
        let s2t2 = st * st;
        (0.5 * self.a * st * self.cross_sum).abs()
            + (0.5 * self.b * s2t2 * self.cross_sq).abs()
            + (self.b * s2t2 * self.norm_pos * self.norm_neg).abs()
            + (self.b * s2t2 * self.cross_prod).abs()
    }

    /// Magnitude of the positive pairing's terms at `(s, t)`.
    pub fn positive_scale(&self, s: f64, t: f64) -> f64 {
        let sp = s.powf(self.p);
        (self.a * s * s * self.norm_pos).abs()
            + (self.b * s.powi(4) * self.norm_pos * self.norm_pos).abs()
            + (self.lambda * s.powf(self.ratio) * self.potential_pos).abs()
            + (sp * self.log_pos).abs()
            + (sp * self.r * s.ln() * self.plain_pos).abs()
            + self.coupling_scale(s, t)
            + (1.5 * self.b * s.powi(3) * t * self.norm_pos * self.cross_sum).abs()
            + (0.5 * self.b * s * t.powi(3) * self.norm_neg * self.cross_sum).abs()
    }

    /// Magnitude of the negative pairing's terms at `(s, t)`.
    pub fn negative_scale(&self, s: f64, t: f64) -> f64 {
        let tp = t.powf(self.p);
        (self.a * t * t * self.norm_neg).abs()
            + (self.b * t.powi(4) * self.norm_neg * self.norm_neg).abs()
            + (self.lambda * t.powf(self.ratio) * self.potential_neg).abs()
            + (tp * self.log_neg).abs()
            + (tp * self.r * t.ln() * self.plain_neg).abs()
            + self.coupling_scale(s, t)
            + (1.5 * self.b * s * t.powi(3) * self.norm_neg * self.cross_sum).abs()
            + (0.5 * self.b * s.powi(3) * t * self.norm_pos * self.cross_sum).abs()
    }
}

/// Both pairings at a single `(s, t)`; see [`SplitPairing`].
pub fn split_pairings(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
    s: f64,
    t: f64,
) -> Result<(f64, f64), ProjectionError> {
    let pairing = SplitPairing::new(graph, dom, params, u)?;
    Ok((pairing.positive(s, t), pairing.negative(s, t)))
}

fn grow_sign_box(
    pairing: &SplitPairing,
    scale_lo: f64,
    scale_hi: f64,
) -> Result<(f64, f64), ProjectionError> {
    let corner_ok_lo =
        |alpha: f64| pairing.positive(alpha, alpha) > 0.0 && pairing.negative(alpha, alpha) > 0.0;
    let corner_ok_hi =
        |beta: f64| pairing.positive(beta, beta) < 0.0 && pairing.negative(beta, beta) < 0.0;
    let mut alpha = scale_lo;
    let mut exp = 0;
    while !corner_ok_lo(alpha) {
        exp += 1;
        if exp > MAX_BOX_EXP {
            return Err(ProjectionError::BoxNotFound {
                exp: MAX_BOX_EXP,
                alpha,
                beta: scale_hi,
            });
        }
        alpha *= 0.5;
    }
    let mut beta = scale_hi.max(2.0 * alpha);
    exp = 0;
    while !corner_ok_hi(beta) {
        exp += 1;
        if exp > MAX_BOX_EXP {
            return Err(ProjectionError::BoxNotFound {
                exp: MAX_BOX_EXP,
                alpha,
                beta,
            });
        }
        beta *= 2.0;
    }
    Ok((alpha, beta))
}

/// Inner bisection: the root of `s ↦ positive(s, t)` in `[alpha, beta]`.
/// The corner signs guarantee `positive(alpha, t) > 0 > positive(beta, t)`
/// for every `t` in the box.
fn inner_root(
    pairing: &SplitPairing,
    t: f64,
    alpha: f64,
    beta: f64,
    target: f64,
    iterations: &mut u32,
) -> f64 {
    let (mut lo, mut hi) = (alpha, beta);
    let mut mid = 0.5 * (lo + hi);
    for _ in 0..MAX_BISECT {
        *iterations += 1;
        let g = pairing.positive(mid, t);
        let rel = g.abs() / (1.0 + pairing.positive_scale(mid, t));
        if rel <= target || (hi - lo) <= 2.0 * f64::EPSILON * mid {
            break;
        }
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        mid = 0.5 * (lo + hi);
    }
    mid
}

/// Pair projection with a caller-supplied starting box, used by the
/// uniqueness probe; the box is still grown until the corner signs hold.
pub fn pair_project_from_box(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
    tol: f64,
    initial_box: (f64, f64),
) -> Result<PairProjection, ProjectionError> {
    let pairing = SplitPairing::new(graph, dom, params, u)?;
    let (alpha, beta) = grow_sign_box(&pairing, initial_box.0, initial_box.1)?;
    let target = 1e-3 * tol;
    let mut iterations = 0u32;

    // Outer bisection on t of negative(s*(t), t). The box-edge signs make the
    // endpoint values positive at t = alpha and negative at t = beta for any
    // inner root choice.
    let (mut lo, mut hi) = (alpha, beta);
    let mut t_mid = 0.5 * (lo + hi);
    let mut s_mid = inner_root(&pairing, t_mid, alpha, beta, target, &mut iterations);
    let mut h_mid = pairing.negative(s_mid, t_mid);
    for _ in 0..MAX_BISECT {
        iterations += 1;
        let rel = h_mid.abs() / (1.0 + pairing.negative_scale(s_mid, t_mid));
        if rel <= target || (hi - lo) <= 2.0 * f64::EPSILON * t_mid {
            break;
        }
        if h_mid > 0.0 {
            lo = t_mid;
        } else {
            hi = t_mid;
        }
        t_mid = 0.5 * (lo + hi);
        s_mid = inner_root(&pairing, t_mid, alpha, beta, target, &mut iterations);
        h_mid = pairing.negative(s_mid, t_mid);
    }
    let residual_g = pairing.positive(s_mid, t_mid).abs()
        / (1.0 + pairing.positive_scale(s_mid, t_mid));
    let residual_h = h_mid.abs() / (1.0 + pairing.negative_scale(s_mid, t_mid));
    if residual_g > tol || residual_h > tol {
        return Err(ProjectionError::ToleranceNotMet {
            residual: residual_g.max(residual_h),
            tol,
        });
    }
    Ok(PairProjection {
        s0: s_mid,
        t0: t_mid,
        residual_g,
        residual_h,
        box_bounds: (alpha, beta),
        iterations,
    })
}

/// Finds the unique positive pair `(s₀, t₀)` with `s₀u⁺ + t₀u⁻` on the nodal
/// constraint set. The starting box is `(2⁻⁴, 2⁴)` scaled by the scalar
/// projections of the two sign parts, grown dyadically until the corner
/// signs hold.
pub fn pair_project(
    graph: &WeightedGraph,
    dom: &Domain,
    params: &ModelParams,
    u: &GraphFunction,
    tol: f64,
) -> Result<PairProjection, ProjectionError> {
    let pos = u.pos_part();
    let neg = u.neg_part();
    if pos.is_zero() || neg.is_zero() {
        return Err(ProjectionError::MissingSignPart);
    }
    let t_pos = scalar_project(graph, dom, params, &pos, tol)?.t0;
    let t_neg = scalar_project(graph, dom, params, &neg, tol)?.t0;
    let scale_lo = t_pos.min(t_neg) / 16.0;
    let scale_hi = t_pos.max(t_neg) * 16.0;
    pair_project_from_box(graph, dom, params, u, tol, (scale_lo, scale_hi))
}
