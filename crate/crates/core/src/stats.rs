//! Two-sample t-tests, Levene's test, five-number summaries and per-class
//! averages, plus the special functions they rest on.

use serde::Serialize;

use crate::corpus::{ClassLabel, MatrixRowOf};
use crate::error::StatsError;
use crate::features::{FeatureId, FEATURE_COUNT};
use crate::scalar::Scalar;
use crate::scoring::{spr, SprBreakdownOf, WeightVectorOf};

/// Significance level of the per-feature sweep.
pub const ALPHA: f64 = 0.05;

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

/// Natural log of the gamma function for `x > 0` (Lanczos approximation).
pub fn ln_gamma<T: Scalar>(x: T) -> T {
    let half = T::of(0.5);
    if x < half {
        // reflection
        let pi = T::of(std::f64::consts::PI);
        return (pi / (pi * x).sin()).ln() - ln_gamma(T::one() - x);
    }
    let x = x - T::one();
    let mut acc = T::of(LANCZOS[0]);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc = acc + T::of(*c) / (x + T::from_count(i));
    }
    let t = x + T::of(LANCZOS_G) + half;
    T::of(0.5 * (2.0 * std::f64::consts::PI).ln()) + (x + half) * t.ln() - t + acc.ln()
}

fn tolerance<T: Scalar>() -> T {
    T::of(1e-12).max(T::epsilon() * T::of(4.0))
}

/// Continued fraction for the incomplete beta (modified Lentz).
fn beta_cf<T: Scalar>(a: T, b: T, x: T) -> T {
    let one = T::one();
    let tiny = T::min_positive_value() / T::epsilon();
    let eps = tolerance::<T>() * T::of(1e-3);
    let guard = |v: T| if v.abs() < tiny { tiny } else { v };
    let (qab, qap, qam) = (a + b, a + one, a - one);
    let mut c = one;
    let mut d = one / guard(one - qab * x / qap);
    let mut h = d;
    for m in 1..=10_000 {
        let m = T::from_count(m);
        let m2 = m + m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = one / guard(one + aa * d);
        c = guard(one + aa / c);
        h = h * d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = one / guard(one + aa * d);
        c = guard(one + aa / c);
        let delta = d * c;
        h = h * delta;
        if (delta - one).abs() <= eps {
            break;
        }
    }
    h
}

/// Regularized incomplete beta `I_x(a, b)`.
pub fn incomplete_beta<T: Scalar>(x: T, a: T, b: T) -> T {
    let (zero, one) = (T::zero(), T::one());
    if x <= zero {
        return zero;
    }
    if x >= one {
        return one;
    }
    let ln_front = ln_gamma(a + b) - ln_gamma(a) - ln_gamma(b) + a * x.ln() + b * (one - x).ln();
    let front = ln_front.exp();
    if x < (a + one) / (a + b + T::of(2.0)) {
        front * beta_cf(a, b, x) / a
    } else {
        one - front * beta_cf(b, a, one - x) / b
    }
}

/// Student-t cumulative distribution function.
pub fn student_t_cdf<T: Scalar>(x: T, df: T) -> T {
    let half = T::of(0.5);
    if x.is_infinite() {
        return if x > T::zero() { T::one() } else { T::zero() };
    }
    let tail = half * incomplete_beta(df / (df + x * x), df * half, half);
    if x > T::zero() {
        T::one() - tail
    } else {
        tail
    }
}

/// Two-tailed p-value of a t statistic.
pub fn student_t_two_tailed<T: Scalar>(t: T, df: T) -> T {
    if t.is_infinite() {
        return T::zero();
    }
    let half = T::of(0.5);
    incomplete_beta(df / (df + t * t), df * half, half).clamp_unit()
}

/// Quantile of the Student-t distribution by bisection on the CDF.
pub fn student_t_quantile<T: Scalar>(p: T, df: T) -> T {
    let half = T::of(0.5);
    if p == half {
        return T::zero();
    }
    if p < half {
        return -student_t_quantile(T::one() - p, df);
    }
    let mut hi = T::one();
    while student_t_cdf(hi, df) < p && hi < T::of(1e12) {
        hi = hi + hi;
    }
    let mut lo = T::zero();
    for _ in 0..200 {
        let mid = half * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if student_t_cdf(mid, df) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    half * (lo + hi)
}

/// Upper tail of the F distribution.
pub fn f_sf<T: Scalar>(f: T, d1: T, d2: T) -> T {
    if f <= T::zero() {
        return T::one();
    }
    if f.is_infinite() {
        return T::zero();
    }
    let half = T::of(0.5);
    incomplete_beta(d2 / (d2 + d1 * f), d2 * half, d1 * half).clamp_unit()
}

pub fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / T::from_count(xs.len())
}

/// Unbiased sample variance.
pub fn sample_variance<T: Scalar>(xs: &[T]) -> T {
    let m = mean(xs);
    xs.iter().map(|&x| (x - m) * (x - m)).sum::<T>() / T::from_count(xs.len() - 1)
}

fn check_sample<T: Scalar>(xs: &[T]) -> Result<(), StatsError> {
    if xs.len() < 2 {
        return Err(StatsError::SampleTooSmall { needed: 2, found: xs.len() });
    }
    if xs.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TTestVariant {
    EqualVar,
    Welch,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TTestResult<T> {
    pub t: T,
    pub df: T,
    pub p_two_tailed: T,
    /// `mean(a) - mean(b)`.
    pub mean_diff: T,
    pub se_diff: T,
    pub ci95: (T, T),
    pub variant: TTestVariant,
}

/// Independent two-sample t-test.
///
/// Two constant samples with equal means give `t = 0, p = 1`; with
/// different means `t` is infinite and `p = 0`.
pub fn ttest<T: Scalar>(a: &[T], b: &[T], variant: TTestVariant) -> Result<TTestResult<T>, StatsError> {
    check_sample(a)?;
    check_sample(b)?;
    let (na, nb) = (T::from_count(a.len()), T::from_count(b.len()));
    let (va, vb) = (sample_variance(a), sample_variance(b));
    let mean_diff = mean(a) - mean(b);
    let one = T::one();
    let pooled_df = na + nb - T::of(2.0);
    let (se, df) = match variant {
        TTestVariant::EqualVar => {
            let sp2 = ((na - one) * va + (nb - one) * vb) / pooled_df;
            ((sp2 * (one / na + one / nb)).sqrt(), pooled_df)
        }
        TTestVariant::Welch => {
            let (qa, qb) = (va / na, vb / nb);
            let se2 = qa + qb;
            let denom = qa * qa / (na - one) + qb * qb / (nb - one);
            let df = if denom > T::zero() { se2 * se2 / denom } else { pooled_df };
            (se2.sqrt(), df)
        }
    };
    let t = if se > T::zero() {
        mean_diff / se
    } else if mean_diff == T::zero() {
        T::zero()
    } else {
        mean_diff.signum() * T::infinity()
    };
    let p = student_t_two_tailed(t, df);
    let half_width = student_t_quantile(T::of(0.975), df) * se;
    Ok(TTestResult {
        t,
        df,
        p_two_tailed: p,
        mean_diff,
        se_diff: se,
        ci95: (mean_diff - half_width, mean_diff + half_width),
        variant,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeveneResult<T> {
    pub w: T,
    pub df1: T,
    pub df2: T,
    pub p: T,
}

/// Levene's test for equal variances with group-mean centering.
pub fn levene<T: Scalar>(a: &[T], b: &[T]) -> Result<LeveneResult<T>, StatsError> {
    check_sample(a)?;
    check_sample(b)?;
    let dev = |xs: &[T]| {
        let m = mean(xs);
        xs.iter().map(|&x| (x - m).abs()).collect::<Vec<_>>()
    };
    let (za, zb) = (dev(a), dev(b));
    let (ma, mb) = (mean(&za), mean(&zb));
    let n = T::from_count(a.len() + b.len());
    let grand = (za.iter().copied().sum::<T>() + zb.iter().copied().sum::<T>()) / n;
    let between = T::from_count(a.len()) * (ma - grand).powi(2) + T::from_count(b.len()) * (mb - grand).powi(2);
    let within: T = za.iter().map(|&z| (z - ma).powi(2)).sum::<T>() + zb.iter().map(|&z| (z - mb).powi(2)).sum::<T>();
    let (df1, df2) = (T::one(), n - T::of(2.0));
    let w = if within > T::zero() {
        df2 / df1 * between / within
    } else if between == T::zero() {
        T::zero()
    } else {
        T::infinity()
    };
    Ok(LeveneResult { w, df1, df2, p: f_sf(w, df1, df2) })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FiveNumber<T> {
    pub min: T,
    pub q1: T,
    pub median: T,
    pub q3: T,
    pub max: T,
}

fn quantile_sorted<T: Scalar>(sorted: &[T], q: f64) -> T {
    let h = (sorted.len() - 1) as f64 * q;
    let lo = h.floor() as usize;
    let frac = T::of(h - lo as f64);
    match sorted.get(lo + 1) {
        Some(&next) => sorted[lo] + frac * (next - sorted[lo]),
        None => sorted[lo],
    }
}

/// Min, quartiles and max; quartiles interpolate linearly between order
/// statistics at position `(n - 1) * q`.
pub fn five_number<T: Scalar>(values: &[T]) -> Result<FiveNumber<T>, StatsError> {
    if values.is_empty() {
        return Err(StatsError::SampleTooSmall { needed: 1, found: 0 });
    }
    if values.iter().any(|x| !x.is_finite()) {
        return Err(StatsError::NonFinite);
    }
    let mut s = values.to_vec();
    s.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
    Ok(FiveNumber {
        min: s[0],
        q1: quantile_sorted(&s, 0.25),
        median: quantile_sorted(&s, 0.5),
        q3: quantile_sorted(&s, 0.75),
        max: s[s.len() - 1],
    })
}

/// Per-class means of the score breakdown.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassAverages<T> {
    pub fr: SprBreakdownOf<T>,
    pub tr: SprBreakdownOf<T>,
    pub n_fr: usize,
    pub n_tr: usize,
}

pub fn class_averages<T: Scalar>(scores: &[(ClassLabel, SprBreakdownOf<T>)]) -> Result<ClassAverages<T>, StatsError> {
    let avg = |label: ClassLabel| -> Result<(SprBreakdownOf<T>, usize), StatsError> {
        let rows: Vec<_> = scores.iter().filter(|(l, _)| *l == label).map(|(_, b)| *b).collect();
        if rows.is_empty() {
            return Err(StatsError::MissingClass(label.as_str()));
        }
        let m = |f: fn(&SprBreakdownOf<T>) -> T| mean(&rows.iter().map(f).collect::<Vec<_>>());
        let b = SprBreakdownOf {
            emo: m(|b| b.emo),
            nws: m(|b| b.nws),
            imp: m(|b| b.imp),
            amb: m(|b| b.amb),
            spr: m(|b| b.spr),
        };
        Ok((b, rows.len()))
    };
    let (fr, n_fr) = avg(ClassLabel::FR)?;
    let (tr, n_tr) = avg(ClassLabel::TR)?;
    Ok(ClassAverages { fr, tr, n_fr, n_tr })
}

/// One row of the per-variable significance sweep. FR is sample `a`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub name: String,
    #[serde(rename = "mean_FR")]
    pub mean_fr: f64,
    #[serde(rename = "mean_TR")]
    pub mean_tr: f64,
    pub t: f64,
    pub df: f64,
    pub p: f64,
    pub significant: bool,
    pub mean_diff: f64,
    pub ci95_lower: f64,
    pub ci95_upper: f64,
    pub welch_t: f64,
    pub welch_df: f64,
    pub welch_p: f64,
    pub levene_w: f64,
    pub levene_p: f64,
}

/// Five-number summaries of one variable per class.
#[derive(Debug, Clone, PartialEq)]
pub struct BoxplotRow<T> {
    pub name: String,
    pub fr: FiveNumber<T>,
    pub tr: FiveNumber<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepReport<T> {
    pub rows: Vec<SweepRow>,
    pub boxplots: Vec<BoxplotRow<T>>,
    pub averages: ClassAverages<T>,
}

/// Names of the sweep variables: the 41 features, then Amb, Imp and SPR.
pub fn sweep_names() -> Vec<String> {
    FeatureId::ALL.iter().map(|f| f.abbr().to_string()).chain(["Amb", "Imp", "SPR"].map(String::from)).collect()
}

fn sweep_row<T: Scalar>(name: &str, a: &[T], b: &[T]) -> Result<SweepRow, StatsError> {
    let eq = ttest(a, b, TTestVariant::EqualVar)?;
    let welch = ttest(a, b, TTestVariant::Welch)?;
    let lev = levene(a, b)?;
    let f = |x: T| x.as_f64();
    Ok(SweepRow {
        name: name.to_string(),
        mean_fr: f(mean(a)),
        mean_tr: f(mean(b)),
        t: f(eq.t),
        df: f(eq.df),
        p: f(eq.p_two_tailed),
        significant: f(eq.p_two_tailed) < ALPHA,
        mean_diff: f(eq.mean_diff),
        ci95_lower: f(eq.ci95.0),
        ci95_upper: f(eq.ci95.1),
        welch_t: f(welch.t),
        welch_df: f(welch.df),
        welch_p: f(welch.p_two_tailed),
        levene_w: f(lev.w),
        levene_p: f(lev.p),
    })
}

/// Runs the t-test, Welch test and Levene test on every feature and on the
/// Amb, Imp and SPR scores, FR against TR. Unlabeled rows are ignored.
pub fn feature_sweep<T: Scalar>(
    rows: &[MatrixRowOf<T>],
    weights: &WeightVectorOf<T>,
) -> Result<SweepReport<T>, StatsError> {
    let mut columns: [Vec<Vec<T>>; 2] = [vec![Vec::new(); FEATURE_COUNT + 3], vec![Vec::new(); FEATURE_COUNT + 3]];
    let mut scored = Vec::new();
    for row in rows {
        let Some(label) = row.label else { continue };
        let b = spr(&row.features, weights);
        let cols = &mut columns[label.code()];
        for (j, v) in row.features.as_slice().iter().enumerate() {
            cols[j].push(*v);
        }
        cols[FEATURE_COUNT].push(b.amb);
        cols[FEATURE_COUNT + 1].push(b.imp);
        cols[FEATURE_COUNT + 2].push(b.spr);
        scored.push((label, b));
    }
    let averages = class_averages(&scored)?;
    let [fr, tr] = &columns;
    let mut out = Vec::with_capacity(FEATURE_COUNT + 3);
    let mut boxplots = Vec::with_capacity(FEATURE_COUNT + 3);
    for (j, name) in sweep_names().iter().enumerate() {
        out.push(sweep_row(name, &fr[j], &tr[j])?);
        boxplots.push(BoxplotRow { name: name.clone(), fr: five_number(&fr[j])?, tr: five_number(&tr[j])? });
    }
    Ok(SweepReport { rows: out, boxplots, averages })
}
