//! Closed-form regret bounds and numeric verifiers for the inequalities
//! behind them.
//!
//! The bounds come in three flavors: the asymptotic lower-bound constant
//! (the coefficient no uniformly good policy can beat), a finite-time upper
//! bound parameterized by per-arm slack, and a slack-free upper bound with
//! explicit lower-order terms. All three decompose per suboptimal arm, and
//! the decompositions are exposed so callers can print them.

use crate::arm::{BanditInstance, UniformArm};
use crate::error::Error;

/// KL divergence between two uniform densities: `ln(span_g / span_f)` when
/// the support of `f` sits inside the support of `g`, infinite otherwise.
pub fn kl_uniform(f: &UniformArm, g: &UniformArm) -> f64 {
    if g.lower() <= f.lower() && f.upper() <= g.upper() {
        (g.span() / f.span()).ln()
    } else {
        f64::INFINITY
    }
}

/// Infimum of `kl_uniform(arm, g)` over uniform supersets `g` whose mean is
/// at least `mu_star`. Closed form: `ln(1 + 2 gap / span)` with
/// `gap = mu_star - mean`.
pub fn kl_infimum_to_mean(arm: &UniformArm, mu_star: f64) -> Result<f64, Error> {
    if !mu_star.is_finite() {
        return Err(Error::OutOfDomain(format!(
            "mu_star must be finite, got {mu_star}"
        )));
    }
    let gap = mu_star - arm.mean();
    if gap < 0.0 {
        return Err(Error::TargetBelowMean {
            mu_star,
            mean: arm.mean(),
        });
    }
    Ok((2.0 * gap / arm.span()).ln_1p())
}

/// Grid resolution for [`kl_infimum_grid`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSearchConfig {
    /// Points per axis on each pass.
    pub points: usize,
    /// Zoom-in passes after the first scan.
    pub refinements: usize,
}

impl Default for GridSearchConfig {
    fn default() -> Self {
        Self {
            points: 501,
            refinements: 2,
        }
    }
}

/// The same infimum as [`kl_infimum_to_mean`], found by scanning candidate
/// supersets `[a', b']` on a grid and zooming in around the best cell. This
/// is the independent route used to cross-check the closed form.
pub fn kl_infimum_grid(
    arm: &UniformArm,
    mu_star: f64,
    cfg: &GridSearchConfig,
) -> Result<f64, Error> {
    if cfg.points < 2 {
        return Err(Error::OutOfDomain(format!(
            "grid needs at least 2 points per axis, got {}",
            cfg.points
        )));
    }
    if !mu_star.is_finite() {
        return Err(Error::OutOfDomain(format!(
            "mu_star must be finite, got {mu_star}"
        )));
    }
    let gap = mu_star - arm.mean();
    if gap < 0.0 {
        return Err(Error::TargetBelowMean {
            mu_star,
            mean: arm.mean(),
        });
    }

    let (a, b, span) = (arm.lower(), arm.upper(), arm.span());
    // Any minimizer keeps a' <= a (shrinking the left overhang only reduces
    // the span) and b' <= b + 2 gap + span, so this box always contains it.
    let mut lo_a = a - span;
    let mut hi_a = a;
    let mut lo_b = b;
    let mut hi_b = b + 2.0 * gap + span;

    let mut best = f64::INFINITY;
    let mut best_a = a;
    let mut best_b = hi_b;
    for _ in 0..=cfg.refinements {
        let step_a = (hi_a - lo_a) / (cfg.points - 1) as f64;
        let step_b = (hi_b - lo_b) / (cfg.points - 1) as f64;
        for ia in 0..cfg.points {
            let ca = lo_a + step_a * ia as f64;
            for ib in 0..cfg.points {
                let cb = lo_b + step_b * ib as f64;
                if 0.5 * (ca + cb) < mu_star {
                    continue;
                }
                let kl = ((cb - ca) / span).ln();
                if kl < best {
                    best = kl;
                    best_a = ca;
                    best_b = cb;
                }
            }
        }
        lo_a = best_a - 3.0 * step_a;
        hi_a = (best_a + 3.0 * step_a).min(a);
        lo_b = (best_b - 3.0 * step_b).max(b);
        hi_b = best_b + 3.0 * step_b;
    }
    Ok(best)
}

/// Asymptotic lower-bound constant: the sum over suboptimal arms of
/// `gap / ln(1 + 2 gap / span)`. Normalized regret of any uniformly good
/// policy must reach at least this multiple of `ln n`.
pub fn m_bk(instance: &BanditInstance) -> f64 {
    let mu_star = instance.mu_star();
    // fold from +0.0: the std sum identity is -0.0, which would leak a
    // negative zero for instances where every arm is optimal
    instance
        .suboptimal_arms()
        .map(|(_, arm)| {
            let gap = mu_star - arm.mean();
            gap / (2.0 * gap / arm.span()).ln_1p()
        })
        .fold(0.0, |acc, term| acc + term)
}

/// Per-arm slack for the finite-time bound. Entries align with instance
/// arms; entries at optimal arms are ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackChoice {
    pub eps: Vec<f64>,
    pub delta: Vec<f64>,
}

impl SlackChoice {
    /// The same (eps, delta) for every arm.
    pub fn uniform(n_arms: usize, eps: f64, delta: f64) -> Self {
        Self {
            eps: vec![eps; n_arms],
            delta: vec![delta; n_arms],
        }
    }
}

/// One suboptimal arm's contribution to the finite-time bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmTerm {
    pub arm: usize,
    pub log_coeff: f64,
    pub const_term: f64,
}

/// Finite-time bound in decomposed form: `total(n) = log_coeff * ln n +
/// const_term`, with per-arm parts.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteTimeBound {
    pub per_arm: Vec<ArmTerm>,
    pub log_coeff: f64,
    pub const_term: f64,
    min_n: u64,
}

impl FiniteTimeBound {
    /// Evaluate at horizon `n`; defined once the initialization phase fits.
    pub fn at(&self, n: u64) -> Result<f64, Error> {
        if n < self.min_n {
            return Err(Error::OutOfDomain(format!(
                "bound is stated for n >= {}, got {n}",
                self.min_n
            )));
        }
        Ok(self.log_coeff * (n as f64).ln() + self.const_term)
    }

    /// Smallest horizon the bound is stated for.
    pub fn min_n(&self) -> u64 {
        self.min_n
    }
}

fn check_slack(
    i: usize,
    gap: f64,
    span: f64,
    s_star: f64,
    eps: f64,
    delta: f64,
) -> Result<(), Error> {
    if !(eps > 0.0 && eps < s_star) {
        return Err(Error::InfeasibleSlack {
            arm: i,
            constraint: format!("0 < eps < S_* (eps = {eps}, S_* = {s_star})"),
        });
    }
    if !(delta > 0.0 && delta < span) {
        return Err(Error::InfeasibleSlack {
            arm: i,
            constraint: format!("0 < delta < span (delta = {delta}, span = {span})"),
        });
    }
    if !(eps + delta < gap) {
        return Err(Error::InfeasibleSlack {
            arm: i,
            constraint: format!(
                "eps + delta < gap (eps + delta = {}, gap = {gap})",
                eps + delta
            ),
        });
    }
    Ok(())
}

/// Decompose the finite-time bound for the support rule under the given
/// slack. Each suboptimal arm needs `0 < eps < S_*`, `0 < delta < span`,
/// and `eps + delta < gap`.
pub fn finite_time_terms(
    instance: &BanditInstance,
    slack: &SlackChoice,
) -> Result<FiniteTimeBound, Error> {
    let n_arms = instance.len();
    if slack.eps.len() != n_arms || slack.delta.len() != n_arms {
        return Err(Error::OutOfDomain(format!(
            "slack lists must have one entry per arm ({} arms, {} eps, {} delta)",
            n_arms,
            slack.eps.len(),
            slack.delta.len()
        )));
    }
    let mu_star = instance.mu_star();
    let s_star = instance.optimal_min_span();
    let mut per_arm = Vec::new();
    let mut log_coeff = 0.0;
    let mut const_term = 0.0;
    for (i, arm) in instance.suboptimal_arms() {
        let gap = mu_star - arm.mean();
        let span = arm.span();
        let (eps, delta) = (slack.eps[i], slack.delta[i]);
        check_slack(i, gap, span, s_star, eps, delta)?;
        let shrink = 1.0 - (eps + delta) / gap;
        let lc = gap / (1.0 + (2.0 * gap / span) * shrink).ln();
        let ct = (span / delta + 0.375 * s_star.powi(3) / eps.powi(3) + 18.0) * gap;
        per_arm.push(ArmTerm {
            arm: i,
            log_coeff: lc,
            const_term: ct,
        });
        log_coeff += lc;
        const_term += ct;
    }
    Ok(FiniteTimeBound {
        per_arm,
        log_coeff,
        const_term,
        min_n: 3 * n_arms as u64,
    })
}

/// Finite-time bound evaluated at horizon `n`.
pub fn finite_time_bound(
    instance: &BanditInstance,
    slack: &SlackChoice,
    n: u64,
) -> Result<f64, Error> {
    finite_time_terms(instance, slack)?.at(n)
}

/// One arm's contribution to the slack-free bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlackFreeArmTerm {
    pub arm: usize,
    pub ln_coeff: f64,
    pub ln34_coeff: f64,
    pub ln14_coeff: f64,
    pub const_term: f64,
}

/// Slack-free bound in decomposed form:
/// `total(n) = ln_coeff * ln n + ln34_coeff * (ln n)^{3/4} +
///  ln14_coeff * (ln n)^{1/4} + const_term`.
///
/// The leading coefficient equals [`m_bk`], which is what
/// makes the rule asymptotically optimal.
#[derive(Debug, Clone, PartialEq)]
pub struct SlackFreeBound {
    pub per_arm: Vec<SlackFreeArmTerm>,
    pub ln_coeff: f64,
    pub ln34_coeff: f64,
    pub ln14_coeff: f64,
    pub const_term: f64,
    min_n: u64,
}

impl SlackFreeBound {
    /// Evaluate at horizon `n`; defined once the initialization phase fits.
    pub fn at(&self, n: u64) -> Result<f64, Error> {
        if n < self.min_n {
            return Err(Error::OutOfDomain(format!(
                "bound is stated for n >= {}, got {n}",
                self.min_n
            )));
        }
        let ln_n = (n as f64).ln();
        Ok(self.ln_coeff * ln_n
            + self.ln34_coeff * ln_n.powf(0.75)
            + self.ln14_coeff * ln_n.powf(0.25)
            + self.const_term)
    }

    /// Smallest horizon the bound is stated for.
    pub fn min_n(&self) -> u64 {
        self.min_n
    }
}

/// Decompose the slack-free bound. The per-arm window width is
/// `G = min(S_*, span, gap/4)`.
pub fn slack_free_terms(instance: &BanditInstance) -> SlackFreeBound {
    let mu_star = instance.mu_star();
    let s_star = instance.optimal_min_span();
    let mut per_arm = Vec::new();
    let (mut c1, mut c34, mut c14, mut c0) = (0.0, 0.0, 0.0, 0.0);
    for (i, arm) in instance.suboptimal_arms() {
        let gap = mu_star - arm.mean();
        let span = arm.span();
        let g = s_star.min(span).min(0.25 * gap);
        let log_term = (2.0 * gap / span).ln_1p();
        let term = SlackFreeArmTerm {
            arm: i,
            ln_coeff: gap / log_term,
            ln34_coeff: 8.0 * g * gap / ((span + 2.0 * gap) * log_term * log_term)
                + 0.375 * s_star.powi(3) * gap / g.powi(3),
            ln14_coeff: span * gap / g,
            const_term: 18.0 * gap,
        };
        per_arm.push(term);
        c1 += term.ln_coeff;
        c34 += term.ln34_coeff;
        c14 += term.ln14_coeff;
        c0 += term.const_term;
    }
    SlackFreeBound {
        per_arm,
        ln_coeff: c1,
        ln34_coeff: c34,
        ln14_coeff: c14,
        const_term: c0,
        min_n: 3 * instance.len() as u64,
    }
}

/// Slack-free bound evaluated at horizon `n`.
pub fn slack_free_bound(instance: &BanditInstance, n: u64) -> Result<f64, Error> {
    slack_free_terms(instance).at(n)
}

/// Tail-split exponents for the remainder sum: `0 < p < 1 < q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderParams {
    p: f64,
    q: f64,
}

impl RemainderParams {
    pub fn new(p: f64, q: f64) -> Result<Self, Error> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::OutOfDomain(format!("need 0 < p < 1, got p = {p}")));
        }
        if !(q > 1.0) || !q.is_finite() {
            return Err(Error::OutOfDomain(format!(
                "need finite q > 1, got q = {q}"
            )));
        }
        Ok(Self { p, q })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// The two remainder coefficients and the assembled tail-sum bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RemainderBound {
    /// `(q / (e p))^{q/p} / (q - 1)`.
    pub c1: f64,
    /// `((p + q) / (e (1 - p)))^{(p+q)/(1-p)} / (q - 1)`.
    pub c2: f64,
    /// `alpha^{-1 - q/p} c1 + c2`.
    pub sum_bound: f64,
}

/// Closed-form bound on the remainder tail sum for decay rate `alpha`.
pub fn remainder_components(params: RemainderParams, alpha: f64) -> Result<RemainderBound, Error> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfDomain(format!(
            "need 0 < alpha < 1, got alpha = {alpha}"
        )));
    }
    let (p, q) = (params.p, params.q);
    let e = std::f64::consts::E;
    let c1 = (q / (e * p)).powf(q / p) / (q - 1.0);
    let c2 = ((p + q) / (e * (1.0 - p))).powf((p + q) / (1.0 - p)) / (q - 1.0);
    let sum_bound = alpha.powf(-1.0 - q / p) * c1 + c2;
    Ok(RemainderBound { c1, c2, sum_bound })
}

/// Joint density of the (min, max) of `k >= 2` iid draws from the arm:
/// `k (k-1) span^{-k} (w - v)^{k-2}` on the wedge `a <= v <= w <= b`, zero
/// elsewhere.
pub fn minmax_joint_density(k: u32, w: f64, v: f64, arm: &UniformArm) -> Result<f64, Error> {
    if k < 2 {
        return Err(Error::OutOfDomain(format!(
            "joint density needs k >= 2, got {k}"
        )));
    }
    let (a, b) = (arm.lower(), arm.upper());
    if v < a || w > b || v > w {
        return Ok(0.0);
    }
    let kf = k as f64;
    Ok(kf * (kf - 1.0) * (w - v).powi(k as i32 - 2) / arm.span().powi(k as i32))
}

/// `P(min >= v, max <= w) = ((w - v) / span)^k` for `a <= v <= w <= b`.
pub fn minmax_joint_cdf_corner(k: u32, w: f64, v: f64, arm: &UniformArm) -> Result<f64, Error> {
    if k < 2 {
        return Err(Error::OutOfDomain(format!(
            "corner probability needs k >= 2, got {k}"
        )));
    }
    let (a, b) = (arm.lower(), arm.upper());
    if !(a <= v && v <= w && w <= b) {
        return Err(Error::OutOfDomain(format!(
            "corner probability needs {a} <= v <= w <= {b}, got v = {v}, w = {w}"
        )));
    }
    Ok(((w - v) / arm.span()).powi(k as i32))
}

/// Composite Simpson rule with an even number of panels.
fn simpson(f: impl Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    let h = (hi - lo) / panels as f64;
    let mut acc = f(lo) + f(hi);
    for j in 1..panels {
        let w = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(lo + h * j as f64);
    }
    acc * h / 3.0
}

/// Mass of the joint (min, max) density over `{v0 <= v <= w <= w0}` clipped
/// to the support wedge, via nested composite Simpson rules with `panels`
/// panels per axis. Integrating over the whole wedge recovers 1.
pub fn minmax_density_mass(
    arm: &UniformArm,
    k: u32,
    v0: f64,
    w0: f64,
    panels: usize,
) -> Result<f64, Error> {
    if k < 2 {
        return Err(Error::OutOfDomain(format!(
            "joint density needs k >= 2, got {k}"
        )));
    }
    if panels < 2 || !panels.is_multiple_of(2) {
        return Err(Error::OutOfDomain(format!(
            "quadrature needs an even panel count >= 2, got {panels}"
        )));
    }
    let lo = v0.max(arm.lower());
    let hi = w0.min(arm.upper());
    if hi <= lo {
        return Ok(0.0);
    }
    let kf = k as f64;
    let norm = kf * (kf - 1.0) / arm.span().powi(k as i32);
    let inner = |v: f64| simpson(|w| norm * (w - v).powi(k as i32 - 2), v, hi, panels);
    Ok(simpson(inner, lo, hi, panels))
}

/// Upper bound on the chance that the support rule's index for the best arm
/// at global time `t` with `s >= 3` samples sits below `mean - eps`:
/// `(1/2) t^{-1 - 1/(s-2)} (1 - alpha)^s` with `alpha = 2 eps / span`.
/// Always in [0, 1/2] for `t >= 1`.
pub fn index_underestimate_prob_bound(
    t: f64,
    s: u64,
    eps: f64,
    optimal_arm: &UniformArm,
) -> Result<f64, Error> {
    if s < 3 {
        return Err(Error::OutOfDomain(format!("needs s >= 3 samples, got {s}")));
    }
    if !(t >= 1.0) || !t.is_finite() {
        return Err(Error::OutOfDomain(format!("needs finite t >= 1, got {t}")));
    }
    let alpha = 2.0 * eps / optimal_arm.span();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfDomain(format!(
            "needs 0 < eps < span/2, got eps = {eps} with span {}",
            optimal_arm.span()
        )));
    }
    let exponent = -1.0 - 1.0 / (s as f64 - 2.0);
    Ok(0.5 * t.powf(exponent) * (1.0 - alpha).powi(s as i32))
}

/// Outcome of checking the double tail sum `sum_{t=3}^{n} (1/t)
/// sum_{s>=1} t^{-1/s} (1-alpha)^s` against its closed-form caps.
///
/// The inner sum is truncated once its geometric tail bound drops below
/// 1e-12; the accumulated truncation allowance is reported in `tail` and
/// added to the left side before comparing. `half_*` is the variant that
/// starts at t = 6 and carries a 1/2 factor against half the cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummationBoundReport {
    pub alpha: f64,
    pub n: u64,
    pub lhs: f64,
    pub tail: f64,
    pub rhs: f64,
    pub holds: bool,
    pub half_lhs: f64,
    pub half_rhs: f64,
    pub half_holds: bool,
}

/// Numerically check the tail-sum cap `30 + 6 / alpha^3` (and its halved,
/// t >= 6 variant) at decay rate `alpha` up to horizon `n`.
pub fn verify_summation_bound(alpha: f64, n: u64) -> Result<SummationBoundReport, Error> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::OutOfDomain(format!(
            "need 0 < alpha < 1, got alpha = {alpha}"
        )));
    }
    if n < 3 {
        return Err(Error::OutOfDomain(format!("need n >= 3, got n = {n}")));
    }
    const TRUNC: f64 = 1e-12;
    let r = 1.0 - alpha;
    let mut lhs = 0.0;
    let mut head = 0.0; // t in 3..=5, subtracted for the halved variant
    let mut tail = 0.0;
    for t in 3..=n {
        let ln_t = (t as f64).ln();
        let mut inner = 0.0;
        let mut geom = 1.0;
        let mut s = 1u64;
        loop {
            geom *= r;
            inner += (-ln_t / s as f64).exp() * geom;
            // remaining tail is at most sum_{s' > s} r^{s'} = r^{s+1}/alpha
            let rest = geom * r / alpha;
            if rest < TRUNC {
                tail += rest / t as f64;
                break;
            }
            s += 1;
        }
        let contrib = inner / t as f64;
        lhs += contrib;
        if t <= 5 {
            head += contrib;
        }
    }
    let rhs = 30.0 + 6.0 / (alpha * alpha * alpha);
    let half_lhs = 0.5 * (lhs - head);
    let half_rhs = 0.5 * rhs;
    Ok(SummationBoundReport {
        alpha,
        n,
        lhs,
        tail,
        rhs,
        holds: lhs + tail <= rhs,
        half_lhs,
        half_rhs,
        half_holds: half_lhs + 0.5 * tail <= half_rhs,
    })
}

/// A checked inequality: left side, right side, and whether it held (with a
/// one part in 10^12 relative allowance for rounding).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

/// Check the log-slack expansion `1 / ln(1 + Q(1 - eps)) <= 1 / ln(1 + Q) +
/// (eps / (1 - eps)) Q / ((1 + Q) ln^2(1 + Q))` at a single point. At
/// `eps = 0` the two sides are the same expression and compare equal.
pub fn verify_log_slack_bound(q: f64, eps: f64) -> Result<InequalityReport, Error> {
    if !(q > 0.0) || !q.is_finite() {
        return Err(Error::OutOfDomain(format!("need finite Q > 0, got {q}")));
    }
    if !(0.0..1.0).contains(&eps) {
        return Err(Error::OutOfDomain(format!("need 0 <= eps < 1, got {eps}")));
    }
    let log_q = (1.0 + q).ln();
    let lhs = 1.0 / (1.0 + q * (1.0 - eps)).ln();
    let rhs = 1.0 / log_q + (eps / (1.0 - eps)) * q / ((1.0 + q) * log_q * log_q);
    let holds = lhs <= rhs * (1.0 + 1e-12);
    Ok(InequalityReport { lhs, rhs, holds })
}
