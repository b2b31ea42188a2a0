//! Classification of `P_F` into the dissipation hierarchy and the decay laws
//! that go with each class.
//!
//! Everything here runs on the normalized polynomial `p / max|p_i|`, so the
//! tolerance is relative. Decisions that land within a factor
//! [`AMBIGUITY_FACTOR`] of the tolerance are reported as
//! [`ClassifyError::Ambiguous`] instead of being resolved either way.

use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Default relative degeneracy threshold.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Values in `(tol, AMBIGUITY_FACTOR * tol]` cannot be called zero or nonzero.
pub const AMBIGUITY_FACTOR: f64 = 100.0;

/// Critical points closer than this to an endpoint root belong to that root.
const ENDPOINT_MERGE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("polynomial is identically zero within tolerance")]
    IdenticallyZero,
    #[error("root structure unresolved at tol = {tol:e}: {reason}")]
    Ambiguous { tol: f64, reason: String },
    #[error("infimum of p/(1-y^2)^{j} over (-1,1) is zero")]
    NotApplicable { j: u8 },
    #[error("tolerance {0:e} outside (0, 1e-3]")]
    BadTolerance(f64),
    #[error("interval [{a}, {b}] is empty")]
    EmptyInterval { a: f64, b: f64 },
    #[error("no decay theorem applies to a non-dissipative nonlinearity")]
    NotDissipative,
    #[error("invalid exponent index j = {0}")]
    BadIndex(u8),
    #[error("norm index p = {0} outside [2, inf]")]
    BadNormIndex(f64),
}

/// `p0 + p1 y + p2 y^2 + p3 y^3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CubicPoly {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub p3: f64,
}

impl CubicPoly {
    pub const fn new(p0: f64, p1: f64, p2: f64, p3: f64) -> Self {
        Self { p0, p1, p2, p3 }
    }

    pub fn from_coeffs(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn coeffs(&self) -> [f64; 4] {
        [self.p0, self.p1, self.p2, self.p3]
    }

    pub fn eval(&self, y: f64) -> f64 {
        self.p0 + y * (self.p1 + y * (self.p2 + y * self.p3))
    }

    pub fn derivative_at(&self, y: f64) -> f64 {
        self.p1 + y * (2.0 * self.p2 + 3.0 * y * self.p3)
    }

    pub fn second_derivative_at(&self, y: f64) -> f64 {
        2.0 * self.p2 + 6.0 * self.p3 * y
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs().iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_coeffs(self.coeffs().map(|c| c * s))
    }

    /// Taylor coefficients in `w = 1 - y` around `y = 1`.
    fn taylor_at_plus_one(&self) -> [f64; 4] {
        let [a, b, c, d] = self.coeffs();
        [a + b + c + d, -(b + 2.0 * c + 3.0 * d), c + 3.0 * d, -d]
    }

    /// Taylor coefficients in `w = 1 + y` around `y = -1`.
    fn taylor_at_minus_one(&self) -> [f64; 4] {
        let [a, b, c, d] = self.coeffs();
        [a - b + c - d, b - 2.0 * c + 3.0 * d, c - 3.0 * d, d]
    }
}

impl fmt::Display for CubicPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {} y + {} y^2 + {} y^3", self.p0, self.p1, self.p2, self.p3)
    }
}

/// Real root of `P_F` in `[-1, 1]` with its multiplicity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Root {
    pub value: f64,
    pub multiplicity: u8,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ClassTag {
    A0,
    B0,
    B1,
    B2,
    B3,
    C,
    NotDissipative,
}

impl ClassTag {
    fn from_endpoint_order(m: u8) -> Self {
        match m {
            1 => ClassTag::B1,
            2 => ClassTag::B2,
            _ => ClassTag::B3,
        }
    }

    /// Exponent index `j` for the `B_j` classes.
    pub fn b_index(self) -> Option<u8> {
        match self {
            ClassTag::B0 => Some(0),
            ClassTag::B1 => Some(1),
            ClassTag::B2 => Some(2),
            ClassTag::B3 => Some(3),
            _ => None,
        }
    }
}

impl fmt::Display for ClassTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ClassTag::A0 => "A0",
            ClassTag::B0 => "B0",
            ClassTag::B1 => "B1",
            ClassTag::B2 => "B2",
            ClassTag::B3 => "B3",
            ClassTag::C => "C",
            ClassTag::NotDissipative => "NotDissipative",
        };
        f.write_str(s)
    }
}

/// Outcome of [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DissipationClass {
    pub tag: ClassTag,
    /// `C_j` for `j = 0..=3`, present when positive.
    pub constants: [Option<f64>; 4],
    pub y0: Option<f64>,
    pub z0: Option<f64>,
    pub min_point: Option<f64>,
    pub min_value: Option<f64>,
}

impl DissipationClass {
    fn bare(tag: ClassTag) -> Self {
        Self { tag, constants: [None; 4], y0: None, z0: None, min_point: None, min_value: None }
    }

    pub fn constant(&self, j: usize) -> Option<f64> {
        self.constants.get(j).copied().flatten()
    }
}

/// Exact minimum of `poly` over `[a, b]` from endpoint values and the real
/// critical points inside the interval. Ties go to the largest minimizer.
pub fn min_on_interval(poly: &CubicPoly, a: f64, b: f64) -> Result<(f64, f64), ClassifyError> {
    if !(a < b) {
        return Err(ClassifyError::EmptyInterval { a, b });
    }
    let mut best = (a, poly.eval(a));
    let mut consider = |y: f64| {
        let v = poly.eval(y);
        if v < best.1 || (v == best.1 && y > best.0) {
            best = (y, v);
        }
    };
    consider(b);
    for c in quadratic_roots(poly.p1, 2.0 * poly.p2, 3.0 * poly.p3) {
        if c > a && c < b {
            consider(c);
        }
    }
    Ok(best)
}

/// Real roots of `c0 + c1 x + c2 x^2`, ascending; degenerate leading terms
/// fall back to the linear case.
fn quadratic_roots(c0: f64, c1: f64, c2: f64) -> Vec<f64> {
    let scale = c0.abs().max(c1.abs()).max(c2.abs());
    if scale == 0.0 {
        return Vec::new();
    }
    if c2.abs() <= 1e-14 * scale {
        if c1 == 0.0 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        // a tangential root shows up as a slightly negative discriminant
        if disc > -1e-14 * c1 * c1 {
            return vec![-c1 / (2.0 * c2)];
        }
        return Vec::new();
    }
    let sq = disc.sqrt();
    // numerically stable pairing
    let q = -0.5 * (c1 + if c1 >= 0.0 { sq } else { -sq });
    let mut r = if q == 0.0 { vec![0.0] } else { vec![q / c2, c0 / q] };
    r.sort_by(f64::total_cmp);
    r
}

/// Real roots of a cubic (or lower degree) polynomial by the depressed-cubic
/// closed form.
fn cubic_real_roots(p: &CubicPoly) -> Vec<f64> {
    let scale = p.max_abs_coeff();
    if scale == 0.0 {
        return Vec::new();
    }
    if p.p3.abs() <= 1e-14 * scale {
        return quadratic_roots(p.p0, p.p1, p.p2);
    }
    let (a, b, c) = (p.p2 / p.p3, p.p1 / p.p3, p.p0 / p.p3);
    // y = t - a/3 gives t^3 + pp t + qq = 0
    let shift = a / 3.0;
    let pp = b - a * a / 3.0;
    let qq = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = (qq / 2.0).powi(2) + (pp / 3.0).powi(3);
    let mut roots = if pp.abs() < 1e-300 && qq.abs() < 1e-300 {
        vec![0.0]
    } else if disc > 0.0 {
        let sq = disc.sqrt();
        let u = (-qq / 2.0 + sq).cbrt();
        let v = (-qq / 2.0 - sq).cbrt();
        vec![u + v]
    } else {
        let m = 2.0 * (-pp / 3.0).sqrt();
        let arg = (3.0 * qq / (pp * m)).clamp(-1.0, 1.0);
        let theta = arg.acos() / 3.0;
        (0..3)
            .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
            .collect()
    };
    for r in roots.iter_mut() {
        *r -= shift;
    }
    roots.sort_by(f64::total_cmp);
    roots
}

/// Newton polish followed by a bisection safeguard when a sign change
/// brackets the estimate.
fn polish(p: &CubicPoly, mut y: f64) -> f64 {
    for _ in 0..4 {
        let d = p.derivative_at(y);
        if d == 0.0 {
            break;
        }
        let step = p.eval(y) / d;
        if !step.is_finite() {
            break;
        }
        y -= step;
    }
    let h = 1e-9 * (1.0 + y.abs());
    let (mut lo, mut hi) = (y - h, y + h);
    let (flo, fhi) = (p.eval(lo), p.eval(hi));
    if flo * fhi < 0.0 {
        let lo_neg = flo < 0.0;
        for _ in 0..80 {
            let mid = 0.5 * (lo + hi);
            if (p.eval(mid) < 0.0) == lo_neg {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        y = 0.5 * (lo + hi);
    }
    y
}

/// Real roots of a polynomial (ascending coefficients, any small degree)
/// inside `[a, b]`, found by isolating monotone pieces between the roots of
/// the derivative and bisecting each sign change.
pub(crate) fn real_roots_in(coeffs: &[f64], a: f64, b: f64) -> Vec<f64> {
    let eval = |y: f64| coeffs.iter().rev().fold(0.0, |acc, &c| acc * y + c);
    let degree = coeffs.iter().rposition(|&c| c != 0.0);
    let Some(degree) = degree else { return Vec::new() };
    if degree == 0 {
        return Vec::new();
    }
    let deriv: Vec<f64> = coeffs[1..=degree].iter().enumerate().map(|(k, &c)| (k + 1) as f64 * c).collect();
    let mut knots = vec![a];
    knots.extend(real_roots_in(&deriv, a, b).into_iter().filter(|&c| c > a && c < b));
    knots.push(b);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (mut lo, mut hi) = (w[0], w[1]);
        let (flo, fhi) = (eval(lo), eval(hi));
        if flo == 0.0 {
            if roots.last().map_or(true, |&r: &f64| r != lo) {
                roots.push(lo);
            }
            continue;
        }
        if flo * fhi > 0.0 {
            continue;
        }
        if fhi == 0.0 {
            continue; // picked up as the left end of the next piece
        }
        let lo_neg = flo < 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if (eval(mid) < 0.0) == lo_neg {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(0.5 * (lo + hi));
    }
    if eval(b) == 0.0 && roots.last().map_or(true, |&r| r != b) {
        roots.push(b);
    }
    roots
}

/// All real roots in `[-1, 1]` with multiplicities.
///
/// Multiple roots are located on the derivatives (a double root of `p` is a
/// root of `p'` where `|p|` vanishes), which is where the closed form loses
/// them to tiny imaginary parts.
pub fn roots_in_interval(poly: &CubicPoly, tol: f64) -> Result<Vec<Root>, ClassifyError> {
    let s = poly.max_abs_coeff();
    if s <= tol {
        return Err(ClassifyError::IdenticallyZero);
    }
    let q = poly.scale(1.0 / s);
    let slack = 1e-12;
    let inside = |y: f64| y >= -1.0 - slack && y <= 1.0 + slack;
    let merge_radius = 10.0 * tol.sqrt();
    let mut roots: Vec<Root> = Vec::new();

    // triple: p = p' = p'' = 0
    if q.p3.abs() > tol {
        let c = -q.p2 / (3.0 * q.p3);
        if inside(c) && q.eval(c).abs() <= tol && q.derivative_at(c).abs() <= tol {
            roots.push(Root { value: c.clamp(-1.0, 1.0), multiplicity: 3 });
        }
    }
    // double: p = p' = 0
    for c in quadratic_roots(q.p1, 2.0 * q.p2, 3.0 * q.p3) {
        if !inside(c) || q.eval(c).abs() > tol {
            continue;
        }
        if roots.iter().any(|r| (r.value - c).abs() <= merge_radius) {
            continue;
        }
        roots.push(Root { value: c.clamp(-1.0, 1.0), multiplicity: 2 });
    }
    // simple roots
    for r in cubic_real_roots(&q) {
        let r = polish(&q, r);
        if !inside(r) {
            continue;
        }
        if roots.iter().any(|m| (m.value - r).abs() <= merge_radius) {
            continue;
        }
        let multiplicity = if q.derivative_at(r).abs() > tol {
            1
        } else if q.second_derivative_at(r).abs() > tol {
            2
        } else {
            3
        };
        roots.push(Root { value: r.clamp(-1.0, 1.0), multiplicity });
    }
    roots.sort_by(|a, b| a.value.total_cmp(&b.value));
    Ok(roots)
}

/// Order of vanishing from Taylor coefficients, or an ambiguity message when
/// the deciding coefficient sits inside the ambiguity band.
fn endpoint_order(taylor: [f64; 4], tol: f64, label: &str) -> Result<u8, String> {
    for (k, &c) in taylor.iter().enumerate() {
        let a = c.abs();
        if a > AMBIGUITY_FACTOR * tol {
            return Ok(k as u8);
        }
        if a > tol {
            return Err(format!("Taylor coefficient {k} at y = {label} is {c:e}"));
        }
    }
    Ok(4)
}

fn ambiguous(tol: f64, reason: impl Into<String>) -> ClassifyError {
    ClassifyError::Ambiguous { tol, reason: reason.into() }
}

/// Sorts `P_F` into A0 / B0..B3 / C / NotDissipative.
pub fn classify(poly: &CubicPoly, tol: f64) -> Result<DissipationClass, ClassifyError> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(ClassifyError::BadTolerance(tol));
    }
    let s = poly.max_abs_coeff();
    if s <= tol {
        return Ok(DissipationClass::bare(ClassTag::A0));
    }
    let q = poly.scale(1.0 / s);
    let band = AMBIGUITY_FACTOR * tol;

    let (arg, min) = min_on_interval(&q, -1.0, 1.0)?;
    if min < -band {
        let mut cls = DissipationClass::bare(ClassTag::NotDissipative);
        cls.min_point = Some(arg);
        cls.min_value = Some(min * s);
        return Ok(cls);
    }
    if min.abs() > tol && min.abs() <= band {
        return Err(ambiguous(tol, format!("minimum {min:e} at y = {arg}")));
    }

    let tag = if min > band {
        ClassTag::B0
    } else {
        let m_plus = endpoint_order(q.taylor_at_plus_one(), tol, "+1").map_err(|r| ambiguous(tol, r))?;
        let m_minus = endpoint_order(q.taylor_at_minus_one(), tol, "-1").map_err(|r| ambiguous(tol, r))?;
        let mut interior = None;
        for c in quadratic_roots(q.p1, 2.0 * q.p2, 3.0 * q.p3) {
            if !(c > -1.0 && c < 1.0) {
                continue;
            }
            let near_plus = 1.0 - c <= ENDPOINT_MERGE && m_plus >= 2;
            let near_minus = c + 1.0 <= ENDPOINT_MERGE && m_minus >= 2;
            if near_plus || near_minus {
                continue;
            }
            let v = q.eval(c);
            if v.abs() <= tol {
                interior = Some(c);
            } else if v <= band {
                return Err(ambiguous(tol, format!("near-double interior root at y = {c}, p = {v:e}")));
            }
        }
        if let Some(y0) = interior {
            if 1.0 - y0.abs() <= ENDPOINT_MERGE {
                return Err(ambiguous(tol, format!("interior zero y0 = {y0} merges with the light cone")));
            }
            let mut cls = DissipationClass::bare(ClassTag::C);
            cls.y0 = Some(y0);
            cls.z0 = Some(y0.atanh());
            return Ok(cls);
        }
        match m_plus.max(m_minus) {
            0 => return Err(ambiguous(tol, format!("minimum {min:e} at y = {arg} is not a resolved root"))),
            m => ClassTag::from_endpoint_order(m.min(3)),
        }
    };

    let mut cls = DissipationClass::bare(tag);
    for j in 0..4u8 {
        if let Ok(v) = ratio_inf_tol(poly, j, tol) {
            cls.constants[j as usize] = Some(v / 8.0);
        }
    }
    Ok(cls)
}

/// `inf_{(-1,1)} p(y) / (1 - y^2)^j` at the default tolerance.
pub fn ratio_inf(poly: &CubicPoly, j: u8) -> Result<f64, ClassifyError> {
    ratio_inf_tol(poly, j, DEFAULT_TOL)
}

/// Root factors at `+-1` are divided out first so the ratio is evaluated as
/// `r(y) (1-y)^a (1+y)^b` with `a, b <= 0`, which stays well conditioned up
/// to the endpoints.
pub fn ratio_inf_tol(poly: &CubicPoly, j: u8, tol: f64) -> Result<f64, ClassifyError> {
    if j > 3 {
        return Err(ClassifyError::BadIndex(j));
    }
    let s = poly.max_abs_coeff();
    if s <= tol {
        return Err(ClassifyError::NotApplicable { j });
    }
    let q = poly.scale(1.0 / s);
    let order = |t: [f64; 4]| t.iter().take_while(|c| c.abs() <= tol).count() as u8;
    let m_plus = order(q.taylor_at_plus_one());
    let m_minus = order(q.taylor_at_minus_one());
    if m_plus > j || m_minus > j {
        return Err(ClassifyError::NotApplicable { j });
    }
    let mut r: Vec<f64> = q.coeffs().to_vec();
    for _ in 0..m_plus {
        r = divide_by_linear(&r, 1.0);
    }
    for _ in 0..m_minus {
        r = divide_by_linear(&r, -1.0);
    }
    let a = m_plus as i32 - j as i32;
    let b = m_minus as i32 - j as i32;
    let eval = |c: &[f64], y: f64| c.iter().rev().fold(0.0, |acc, &v| acc * y + v);
    let f = |y: f64| eval(&r, y) * (1.0 - y).powi(a) * (1.0 + y).powi(b);

    // g = r' (1 - y^2) - a r (1 + y) + b r (1 - y)
    let dr: Vec<f64> = r.iter().enumerate().skip(1).map(|(k, &c)| k as f64 * c).collect();
    let mut g = vec![0.0; r.len() + 2];
    for (k, &c) in dr.iter().enumerate() {
        g[k] += c;
        g[k + 2] -= c;
    }
    for (k, &c) in r.iter().enumerate() {
        g[k] += (b - a) as f64 * c;
        g[k + 1] += -(a + b) as f64 * c;
    }

    let mut inf = f64::INFINITY;
    for y in real_roots_in(&g, -1.0, 1.0) {
        if y > -1.0 && y < 1.0 {
            inf = inf.min(f(y));
        }
    }
    if a == 0 {
        inf = inf.min(eval(&r, 1.0) * 2f64.powi(b));
    }
    if b == 0 {
        inf = inf.min(eval(&r, -1.0) * 2f64.powi(a));
    }
    if inf.is_infinite() {
        // monotone between two infinite limits cannot happen for a
        // polynomial ratio; fall back to the midpoint as a witness
        inf = f(0.0);
    }
    if inf <= tol {
        return Err(ClassifyError::NotApplicable { j });
    }
    Ok(inf * s)
}

/// Synthetic division by `(y - root)` for `root = 1`, and by `(1 + y)` for
/// `root = -1`; the remainder is dropped. Dividing by `1 - y` flips the sign
/// relative to `y - 1`, which is accounted for here.
fn divide_by_linear(c: &[f64], root: f64) -> Vec<f64> {
    let n = c.len();
    if n <= 1 {
        return vec![0.0];
    }
    let mut out = vec![0.0; n - 1];
    let mut carry = 0.0;
    for k in (1..n).rev() {
        carry = c[k] + carry * root;
        out[k - 1] = carry;
    }
    if root > 0.0 {
        // p = (y - 1) q  =>  p = (1 - y)(-q)
        for v in out.iter_mut() {
            *v = -*v;
        }
    }
    out
}

/// Which norm a decay statement concerns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NormTarget {
    /// `||u(t)||_p`
    U,
    /// `||u_t(t)||_p + ||u_x(t)||_p`
    Du,
}

impl NormTarget {
    pub const ALL: [NormTarget; 2] = [NormTarget::U, NormTarget::Du];

    pub fn name(self) -> &'static str {
        match self {
            NormTarget::U => "u",
            NormTarget::Du => "du",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "u" => Some(NormTarget::U),
            "du" => Some(NormTarget::Du),
            _ => None,
        }
    }
}

/// `norm <~ t^{-a} (log t)^{-q} (log log t)^{r}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateExponents {
    pub a: f64,
    pub q: f64,
    pub r: f64,
}

/// Predicted decay for one dissipation class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecayLaw {
    pub class: ClassTag,
}

impl DecayLaw {
    pub fn exponents(&self, target: NormTarget, p: f64) -> Result<RateExponents, ClassifyError> {
        if !(p >= 2.0) {
            return Err(ClassifyError::BadNormIndex(p));
        }
        let inv_p = if p.is_infinite() { 0.0 } else { 1.0 / p };
        let a = 0.5 - inv_p;
        let p_is_two = p == 2.0;
        let (q, r) = match (self.class, target) {
            (ClassTag::A0, _) => (0.0, 0.0),
            (ClassTag::B0, _) => (0.5, 0.0),
            (ClassTag::B1, NormTarget::U) => (0.5, 0.0),
            (ClassTag::B1, NormTarget::Du) | (ClassTag::B2, NormTarget::U) => {
                if p_is_two {
                    (0.5, 0.5)
                } else {
                    (inv_p, 0.0)
                }
            }
            (ClassTag::B2, NormTarget::Du) | (ClassTag::B3, NormTarget::U) | (ClassTag::C, _) => {
                (0.5 * inv_p, 0.0)
            }
            (ClassTag::B3, NormTarget::Du) => (inv_p / 3.0, 0.0),
            (ClassTag::NotDissipative, _) => return Err(ClassifyError::NotDissipative),
        };
        Ok(RateExponents { a, q, r })
    }

    /// True when the predicted rate beats the free one.
    pub fn enhances(&self, target: NormTarget, p: f64) -> bool {
        self.exponents(target, p).map_or(false, |e| e.q > 0.0)
    }
}

pub fn predicted_decay(cls: &DissipationClass) -> Result<DecayLaw, ClassifyError> {
    if cls.tag == ClassTag::NotDissipative {
        return Err(ClassifyError::NotDissipative);
    }
    Ok(DecayLaw { class: cls.tag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn grid_min(p: &CubicPoly, a: f64, b: f64, n: usize) -> (f64, f64) {
        (0..=n)
            .map(|k| a + (b - a) * k as f64 / n as f64)
            .map(|y| (y, p.eval(y)))
            .fold((a, f64::INFINITY), |m, v| if v.1 <= m.1 { v } else { m })
    }

    #[test]
    fn min_on_interval_examples() {
        let (y, m) = min_on_interval(&CubicPoly::new(1.0, 0.0, -1.0, 0.0), -1.0, 1.0).unwrap();
        assert_eq!(m, 0.0);
        assert_eq!(y.abs(), 1.0);
        let (y, m) = min_on_interval(&CubicPoly::new(0.0, 0.0, 3.0, 0.0), -1.0, 1.0).unwrap();
        assert_eq!((y, m), (0.0, 0.0));
        let p = CubicPoly::new(1.0, -1.0, -1.0, 1.0);
        let (y, m) = min_on_interval(&p, -1.0, 1.0).unwrap();
        let (gy, gm) = grid_min(&p, -1.0, 1.0, 1_000_000);
        assert!((y - gy).abs() < 1e-5 && (y - 1.0).abs() < 1e-12);
        assert!(m <= gm + 1e-15 && m.abs() < 1e-15);
        assert!(min_on_interval(&p, 1.0, 1.0).is_err());
    }

    #[test]
    fn roots_examples() {
        let r = roots_in_interval(&CubicPoly::new(1.0, -1.0, -1.0, 1.0), DEFAULT_TOL).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!((r[0].multiplicity, r[1].multiplicity), (1, 2));
        assert!((r[0].value + 1.0).abs() < 1e-12 && (r[1].value - 1.0).abs() < 1e-12);

        let r = roots_in_interval(&CubicPoly::new(0.0, 0.0, 3.0, 0.0), DEFAULT_TOL).unwrap();
        assert_eq!(r, vec![Root { value: 0.0, multiplicity: 2 }]);

        let r = roots_in_interval(&CubicPoly::new(1.0, 0.0, -1.0, 0.0), DEFAULT_TOL).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|x| x.multiplicity == 1));
        assert!((r[0].value + 1.0).abs() < 1e-12 && (r[1].value - 1.0).abs() < 1e-12);

        let r = roots_in_interval(&CubicPoly::new(3.0, -9.0, 9.0, -3.0), DEFAULT_TOL).unwrap();
        assert_eq!(r, vec![Root { value: 1.0, multiplicity: 3 }]);

        assert_eq!(
            roots_in_interval(&CubicPoly::new(0.0, 1e-12, 0.0, 0.0), DEFAULT_TOL),
            Err(ClassifyError::IdenticallyZero)
        );
    }

    #[test]
    fn roots_of_three_distinct() {
        // (y - 0.5)(y + 0.25)(y - 0.9)
        let roots = [0.5, -0.25, 0.9];
        let p = CubicPoly::new(
            -roots[0] * roots[1] * roots[2],
            roots[0] * roots[1] + roots[0] * roots[2] + roots[1] * roots[2],
            -(roots[0] + roots[1] + roots[2]),
            1.0,
        );
        let r = roots_in_interval(&p, DEFAULT_TOL).unwrap();
        let vals: Vec<f64> = r.iter().map(|r| r.value).collect();
        assert_eq!(r.len(), 3);
        for (v, e) in vals.iter().zip([-0.25, 0.5, 0.9]) {
            assert!((v - e).abs() < 1e-12);
        }
    }

    #[test]
    fn classify_examples() {
        let tol = DEFAULT_TOL;
        assert_eq!(classify(&CubicPoly::new(0.0, 0.0, 0.0, 0.0), tol).unwrap().tag, ClassTag::A0);

        let b1 = classify(&CubicPoly::new(1.0, 0.0, -1.0, 0.0), tol).unwrap();
        assert_eq!(b1.tag, ClassTag::B1);
        assert_relative_eq!(b1.constant(1).unwrap(), 0.125, max_relative = 1e-12);
        assert_eq!(b1.constant(0), None);

        let b2 = classify(&CubicPoly::new(1.0, -1.0, -1.0, 1.0), tol).unwrap();
        assert_eq!(b2.tag, ClassTag::B2);
        assert_relative_eq!(b2.constant(2).unwrap(), 1.0 / 16.0, max_relative = 1e-12);
        assert_eq!(b2.constant(1), None);

        let b3 = classify(&CubicPoly::new(3.0, -9.0, 9.0, -3.0), tol).unwrap();
        assert_eq!(b3.tag, ClassTag::B3);
        assert_relative_eq!(b3.constant(3).unwrap(), 3.0 / 64.0, max_relative = 1e-12);

        let c = classify(&CubicPoly::new(0.0, 0.0, 3.0, 0.0), tol).unwrap();
        assert_eq!(c.tag, ClassTag::C);
        assert_eq!(c.y0, Some(0.0));
        assert_eq!(c.z0, Some(0.0));
        assert!(c.constants.iter().all(Option::is_none));

        let b0 = classify(&CubicPoly::new(3.0, 0.0, 0.0, 0.0), tol).unwrap();
        assert_eq!(b0.tag, ClassTag::B0);
        assert_relative_eq!(b0.constant(0).unwrap(), 3.0 / 8.0, max_relative = 1e-12);
        assert!(b0.constants.iter().all(Option::is_some));
    }

    #[test]
    fn classify_mixed_interior_and_endpoint_zero_is_c() {
        // (1 - y)(y - 0.3)^2
        let p = CubicPoly::new(0.09, -0.69, 1.6, -1.0);
        let cls = classify(&p, DEFAULT_TOL).unwrap();
        assert_eq!(cls.tag, ClassTag::C);
        assert!((cls.y0.unwrap() - 0.3).abs() < 1e-9);
    }

    #[test]
    fn classify_not_dissipative() {
        // y - y^3 is negative on (-1, 0)
        let p = CubicPoly::new(0.0, 1.0, 0.0, -1.0);
        let cls = classify(&p, DEFAULT_TOL).unwrap();
        assert_eq!(cls.tag, ClassTag::NotDissipative);
        assert!(cls.min_value.unwrap() < 0.0);
        assert!(predicted_decay(&cls).is_err());
    }

    #[test]
    fn classify_surfaces_ambiguity() {
        // (y - 0.2)^2 + 5e-9: double root hidden inside the ambiguity band
        let p = CubicPoly::new(0.04 + 5e-9, -0.4, 1.0, 0.0);
        assert!(matches!(classify(&p, DEFAULT_TOL), Err(ClassifyError::Ambiguous { .. })));
        assert!(matches!(classify(&p, 0.0), Err(ClassifyError::BadTolerance(_))));
        assert!(matches!(classify(&p, 1e-2), Err(ClassifyError::BadTolerance(_))));
    }

    #[test]
    fn ratio_inf_examples() {
        assert_relative_eq!(ratio_inf(&CubicPoly::new(8.0, 0.0, 0.0, 0.0), 0).unwrap(), 8.0);
        assert_relative_eq!(ratio_inf(&CubicPoly::new(1.0, 0.0, -1.0, 0.0), 1).unwrap(), 1.0, max_relative = 1e-12);
        let p = CubicPoly::new(1.0, -1.0, -1.0, 1.0);
        assert_relative_eq!(ratio_inf(&p, 2).unwrap(), 0.5, max_relative = 1e-12);
        // grid oracle for the same ratio 1/(1+y)
        let grid = (1..1_000_000)
            .map(|k| -1.0 + 2.0 * k as f64 / 1e6)
            .map(|y| p.eval(y) / (1.0 - y * y).powi(2))
            .fold(f64::INFINITY, f64::min);
        assert!((grid - 0.5).abs() < 1e-5);
        assert_eq!(ratio_inf(&p, 1), Err(ClassifyError::NotApplicable { j: 1 }));
        assert_eq!(ratio_inf(&p, 4), Err(ClassifyError::BadIndex(4)));
    }

    #[test]
    fn ratio_inf_interior_minimum() {
        // 2 + y - y^2 vs (1 - y^2): interior critical point
        let p = CubicPoly::new(1.5, 0.5, 0.0, 0.0);
        let v = ratio_inf(&p, 1).unwrap();
        let grid = (1..200_000)
            .map(|k| -1.0 + 2.0 * k as f64 / 2e5)
            .map(|y| p.eval(y) / (1.0 - y * y))
            .fold(f64::INFINITY, f64::min);
        assert!((v - grid).abs() < 1e-8, "{v} vs {grid}");
    }

    #[test]
    fn decay_table() {
        let law = |c| DecayLaw { class: c };
        let e = law(ClassTag::B1).exponents(NormTarget::Du, 2.0).unwrap();
        assert_eq!((e.a, e.q, e.r), (0.0, 0.5, 0.5));
        let e = law(ClassTag::B3).exponents(NormTarget::U, f64::INFINITY).unwrap();
        assert_eq!((e.a, e.q), (0.5, 0.0));
        let e = law(ClassTag::C).exponents(NormTarget::Du, 4.0).unwrap();
        assert_eq!((e.a, e.q), (0.25, 0.125));
        let e = law(ClassTag::B0).exponents(NormTarget::U, f64::INFINITY).unwrap();
        assert_eq!(e.q, 0.5);
        let e = law(ClassTag::B2).exponents(NormTarget::U, 2.0).unwrap();
        assert_eq!((e.q, e.r), (0.5, 0.5));
        let e = law(ClassTag::B2).exponents(NormTarget::U, 4.0).unwrap();
        assert_eq!((e.q, e.r), (0.25, 0.0));
        let e = law(ClassTag::B3).exponents(NormTarget::Du, 4.0).unwrap();
        assert_relative_eq!(e.q, 1.0 / 12.0);
        assert!(!law(ClassTag::A0).enhances(NormTarget::U, 2.0));
        assert!(law(ClassTag::B0).exponents(NormTarget::U, 1.5).is_err());
    }
}
