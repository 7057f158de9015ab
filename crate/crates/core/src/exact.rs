//! Exact arithmetic for the center values `B^k(chi_Q)(0)` and the combinatorial
//! identities behind their nonvanishing.
//!
//! Everything here is computed with arbitrary-precision rationals. Values that
//! involve pi live in [`ExactScalar`], the Q-span of `{1, pi, 1/pi}`.

use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{domain, Result};

/// Reduced rational with positive denominator.
pub type Rational = BigRational;

pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

fn binomial(n: u64, k: u64) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

fn pow2(e: u64) -> BigInt {
    BigInt::one() << (e as usize)
}

fn sign(m: u64) -> BigInt {
    if m % 2 == 0 {
        BigInt::one()
    } else {
        -BigInt::one()
    }
}

/// Converts a rational to the nearest double, also for huge numerators and
/// denominators.
pub fn rational_to_f64(q: &Rational) -> f64 {
    if let (Some(n), Some(d)) = (q.numer().to_f64(), q.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    // rescale so that both parts fit
    let shift = q.denom().bits().max(q.numer().bits()).saturating_sub(900);
    let n = (q.numer() >> shift as usize).to_f64().unwrap_or(0.0);
    let d = (q.denom() >> shift as usize).to_f64().unwrap_or(1.0);
    n / d
}

/// `num/den` rendering used in CSV output.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Exact value `c_const + c_pi * pi + c_invpi / pi` with rational coefficients.
///
/// Closed under addition and rational scaling. There is no general product:
/// `pi * pi` leaves the algebra.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactScalar {
    pub c_const: Rational,
    pub c_pi: Rational,
    pub c_invpi: Rational,
}

impl ExactScalar {
    pub fn new(c_const: Rational, c_pi: Rational, c_invpi: Rational) -> Self {
        ExactScalar {
            c_const,
            c_pi,
            c_invpi,
        }
    }

    pub fn zero() -> Self {
        Self::new(Rational::zero(), Rational::zero(), Rational::zero())
    }

    pub fn rational(q: Rational) -> Self {
        Self::new(q, Rational::zero(), Rational::zero())
    }

    pub fn pi_multiple(q: Rational) -> Self {
        Self::new(Rational::zero(), q, Rational::zero())
    }

    pub fn is_zero(&self) -> bool {
        self.c_const.is_zero() && self.c_pi.is_zero() && self.c_invpi.is_zero()
    }

    pub fn scale(&self, q: &Rational) -> Self {
        Self::new(&self.c_const * q, &self.c_pi * q, &self.c_invpi * q)
    }

    /// Divides by pi. Only defined when the `1/pi` channel is empty.
    pub fn div_pi(&self) -> Result<Self> {
        if !self.c_invpi.is_zero() {
            return domain("dividing a 1/pi term by pi leaves the {1, pi, 1/pi} algebra");
        }
        Ok(Self::new(self.c_pi.clone(), Rational::zero(), self.c_const.clone()))
    }

    /// Double-precision value.
    pub fn numeric(&self) -> f64 {
        rational_to_f64(&self.c_const)
            + rational_to_f64(&self.c_pi) * PI
            + rational_to_f64(&self.c_invpi) / PI
    }
}

impl fmt::Display for ExactScalar {
    /// Canonical form `(a/b) + (c/d)*pi + (e/f)/pi`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({}) + ({})*pi + ({})/pi",
            format_rational(&self.c_const),
            format_rational(&self.c_pi),
            format_rational(&self.c_invpi)
        )
    }
}

impl Add for ExactScalar {
    type Output = ExactScalar;
    fn add(self, o: ExactScalar) -> ExactScalar {
        ExactScalar::new(
            self.c_const + o.c_const,
            self.c_pi + o.c_pi,
            self.c_invpi + o.c_invpi,
        )
    }
}

impl Sub for ExactScalar {
    type Output = ExactScalar;
    fn sub(self, o: ExactScalar) -> ExactScalar {
        self + (-o)
    }
}

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar::new(-self.c_const, -self.c_pi, -self.c_invpi)
    }
}

/// Index of the definite integral `I(d, 2n) = int_0^1 x^(2n) / (x^2+1)^d dx`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct IntegralKey {
    d: u32,
    n: u32,
}

impl IntegralKey {
    pub fn new(d: u32, n: u32) -> Result<Self> {
        if d == 0 || n >= d {
            return domain(format!("I(d, 2n) needs 0 <= n < d, got d={d}, n={n}"));
        }
        Ok(IntegralKey { d, n })
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }
}

/// `x^(2n-1) / (2(d-1)(x^2+1)^(d-1))` evaluated at `x = 1`.
fn endpoint_term(d: u32) -> Rational {
    let d = d as u64;
    Rational::new(BigInt::one(), BigInt::from(2 * (d - 1)) * pow2(d - 1))
}

fn int_i_order_zero(d: u32) -> ExactScalar {
    // I(1,0) = arctan(1); I(d,0) = x/(2(d-1)(x^2+1)^(d-1)) | + (2d-3)/(2(d-1)) I(d-1,0)
    let mut acc = ExactScalar::pi_multiple(rat(1, 4));
    for e in 2..=d {
        let factor = rat(2 * e as i64 - 3, 2 * (e as i64 - 1));
        acc = ExactScalar::rational(endpoint_term(e)) + acc.scale(&factor);
    }
    acc
}

/// `int_0^1 x^(2n) / (x^2+1)^d dx`, exactly.
///
/// Integration by parts lowers `(d, n)` to `(d-1, n-1)` with boundary term
/// `-1/(2(d-1) 2^(d-1))`; once `n = 0` the standard reduction of
/// `1/(x^2+1)^d` takes over down to `arctan(1) = pi/4`.
pub fn int_i(key: IntegralKey) -> ExactScalar {
    let IntegralKey { d, n } = key;
    if n == 0 {
        return int_i_order_zero(d);
    }
    let factor = rat(2 * n as i64 - 1, 2 * (d as i64 - 1));
    let lowered = int_i(IntegralKey { d: d - 1, n: n - 1 });
    ExactScalar::rational(-endpoint_term(d)) + lowered.scale(&factor)
}

/// Factor in front of `I(d-n, 0)` after lowering `I(d, 2n)` n times:
/// `(2n-1)! / (2^(n-1) (n-1)!) * (d-n-1)! / (2^n (d-1)!)`.
pub fn lowering_factor(key: IntegralKey) -> Result<Rational> {
    let (d, n) = (key.d as u64, key.n as u64);
    if n == 0 {
        return domain("lowering factor needs n >= 1");
    }
    let num = factorial(2 * n - 1) * factorial(d - n - 1);
    let den = pow2(n - 1) * factorial(n - 1) * pow2(n) * factorial(d - 1);
    Ok(Rational::new(num, den))
}

/// Factor in front of `I(1, 0)` in the reduction of `I(k, 0)`, `k >= 2`:
/// `(2k-3)! / (2^(2k-3) (k-1)! (k-2)!)`.
pub fn arctan_factor(k: u32) -> Result<Rational> {
    if k < 2 {
        return domain("arctan factor needs k >= 2");
    }
    let k = k as u64;
    let num = factorial(2 * k - 3);
    let den = pow2(2 * k - 3) * factorial(k - 1) * factorial(k - 2);
    Ok(Rational::new(num, den))
}

/// `int_0^1 F_j(x) dx` with
/// `F_j(x) = sum_{m=0}^{2j-1} (-1)^m C(4j, 2m+1) x^(2m+2) / (x^2+1)^(2j+1)`.
///
/// The result always has pi-coefficient `-1/4`.
pub fn fj_integral(j: u32) -> Result<ExactScalar> {
    if j == 0 {
        return domain("j must be positive");
    }
    let jj = j as u64;
    let mut acc = ExactScalar::zero();
    for m in 0..2 * jj {
        let coef = Rational::from_integer(sign(m) * binomial(4 * jj, 2 * m + 1));
        let key = IntegralKey::new(2 * j + 1, m as u32 + 1)?;
        acc = acc + int_i(key).scale(&coef);
    }
    Ok(acc)
}

/// `B^k(chi_Q)(0)` for a centered axis-parallel square: zero for odd `k`,
/// and `(-4/pi) * fj_integral(k/2)` for even `k` (independent of the side).
pub fn center_value(k: u32) -> Result<ExactScalar> {
    if k == 0 {
        return domain("order must be positive");
    }
    if k % 2 == 1 {
        return Ok(ExactScalar::zero());
    }
    fj_integral(k / 2)?.scale(&rat(-4, 1)).div_pi()
}

/// `S(j) = sum_{m=0}^{2j-1} (-1)^m C(2j-1, m) / (4j - 2m - 1)`.
pub fn sum_s(j: u32) -> Result<Rational> {
    if j == 0 {
        return domain("j must be positive");
    }
    let jj = j as u64;
    let mut acc = Rational::zero();
    for m in 0..2 * jj {
        acc += Rational::new(sign(m) * binomial(2 * jj - 1, m), BigInt::from(4 * jj - 2 * m - 1));
    }
    Ok(acc)
}

/// `(4j)! / ((2j)! (2j-1)! 2^(4j-1))`, the prefactor that turns `S(j)` into
/// the left-hand side of the center-value identity.
pub fn suma_coefficient(j: u32) -> Result<Rational> {
    if j == 0 {
        return domain("j must be positive");
    }
    let jj = j as u64;
    Ok(Rational::new(
        factorial(4 * jj),
        factorial(2 * jj) * factorial(2 * jj - 1) * pow2(4 * jj - 1),
    ))
}

/// The full combinatorial sum whose value `-1` forces the pi-part of
/// `int F_j` to be `-arctan`:
///
/// `sum_{m=0}^{2j-2} (-1)^m C(4j,2m+1) (2m+1)!(4j-2m-3)! / (m!(2j)!(2j-m-2)! 2^(4j-2))
///  - (4j)! / ((2j-1)!(2j)! 2^(4j-1))`.
pub fn suma_lhs(j: u32) -> Result<Rational> {
    if j == 0 {
        return domain("j must be positive");
    }
    let jj = j as u64;
    let mut acc = Rational::zero();
    for m in 0..=(2 * jj - 2) {
        let num = sign(m)
            * binomial(4 * jj, 2 * m + 1)
            * factorial(2 * m + 1)
            * factorial(4 * jj - 2 * m - 3);
        let den = factorial(m) * factorial(2 * jj) * factorial(2 * jj - m - 2) * pow2(4 * jj - 2);
        acc += Rational::new(num, den);
    }
    Ok(acc - suma_coefficient(j)?)
}

/// State of the telescoping evaluation of `S(j)` after some steps.
///
/// `prefactor * inner == S(j)` at every step. Step `t` subtracts
/// `1/(2t+1)` (the value of the last summand) from every term, which is free
/// because the alternating binomial sum vanishes, and then uses
/// `C(N, m)(N - m) = N C(N-1, m)` to drop the last term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TelescopeStep {
    pub prefactor: Rational,
    pub inner: Rational,
    /// Upper summation index of the inner sum.
    pub top: u64,
}

/// Applies `step` telescoping moves to `S(j)`; `step` ranges over `0..=2j-1`.
pub fn telescope_step(j: u32, step: u32) -> Result<TelescopeStep> {
    if j == 0 {
        return domain("j must be positive");
    }
    let jj = j as u64;
    if step as u64 > 2 * jj - 1 {
        return domain(format!("step {step} out of range 0..={}", 2 * jj - 1));
    }
    let mut prefactor = Rational::one();
    for t in 0..step as u64 {
        let top = 2 * jj - 1 - t;
        prefactor *= Rational::new(BigInt::from(-2) * BigInt::from(top), BigInt::from(2 * t + 1));
    }
    let top = 2 * jj - 1 - step as u64;
    let mut inner = Rational::zero();
    for m in 0..=top {
        inner += Rational::new(sign(m) * binomial(top, m), BigInt::from(4 * jj - 2 * m - 1));
    }
    Ok(TelescopeStep {
        prefactor,
        inner,
        top,
    })
}

/// `mu_n = int_{[-1,1]^2} conj(xi)^n dA(xi)`.
///
/// Expanding `(x - i y)^n` only the terms with both exponents even survive,
/// and those carry the real factor `(-i)^(2q) = (-1)^q`.
pub fn square_moment(n: u32) -> Rational {
    let n = n as u64;
    let mut acc = Rational::zero();
    let mut k = 0;
    while k <= n {
        if (n - k) % 2 == 0 {
            let term = Rational::from_integer(sign(k / 2) * binomial(n, k))
                * rat(2, (n - k + 1) as i64)
                * rat(2, (k + 1) as i64);
            acc += term;
        }
        k += 2;
    }
    acc
}

/// `sum_S(j)` closed form after all telescoping steps:
/// `(-2)^(2j-1) (2j-1)! / (1 * 3 * ... * (4j-1))`.
pub fn sum_s_closed_form(j: u32) -> Result<Rational> {
    if j == 0 {
        return domain("j must be positive");
    }
    let jj = j as u64;
    let odd_product = (0..2 * jj).fold(BigInt::one(), |acc, t| acc * BigInt::from(2 * t + 1));
    let num = -(pow2(2 * jj - 1) * factorial(2 * jj - 1));
    Ok(Rational::new(num, odd_product))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_integer::Integer;
    use num_traits::Signed;

    /// Composite Simpson rule; independent oracle for the 1-D integrals.
    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
        let h = (b - a) / panels as f64;
        let mut s = f(a) + f(b);
        for i in 1..panels {
            let x = a + i as f64 * h;
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(x);
        }
        s * h / 3.0
    }

    fn key(d: u32, n: u32) -> IntegralKey {
        IntegralKey::new(d, n).unwrap()
    }

    #[test]
    fn int_i_examples() {
        assert_eq!(int_i(key(1, 0)), ExactScalar::pi_multiple(rat(1, 4)));
        // antiderivative x/(2(x^2+1)) + arctan(x)/2
        assert_eq!(int_i(key(2, 0)), ExactScalar::new(rat(1, 4), rat(1, 8), rat(0, 1)));
        // x = tan(t): int_0^{pi/4} sin^2 cos^2 dt = pi/32
        assert_eq!(int_i(key(3, 1)), ExactScalar::pi_multiple(rat(1, 32)));
    }

    #[test]
    fn invalid_keys() {
        assert!(IntegralKey::new(3, 3).is_err());
        assert!(IntegralKey::new(0, 0).is_err());
    }

    #[test]
    fn int_i_matches_simpson() {
        for d in 1..=8u32 {
            for n in 0..d {
                let exact = int_i(key(d, n)).numeric();
                let numeric = simpson(
                    |x| x.powi(2 * n as i32) / (x * x + 1.0).powi(d as i32),
                    0.0,
                    1.0,
                    20_000,
                );
                assert!((exact - numeric).abs() < 1e-12, "d={d} n={n}: {exact} vs {numeric}");
            }
        }
    }

    #[test]
    fn lowering_recurrence_holds() {
        for d in 2..=12u32 {
            for n in 1..d {
                let lhs = int_i(key(d, n));
                let rhs = ExactScalar::rational(-endpoint_term(d))
                    + int_i(key(d - 1, n - 1)).scale(&rat(2 * n as i64 - 1, 2 * (d as i64 - 1)));
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn closed_form_reduction_factors() {
        // pi part of I(d,2n) = lowering_factor * pi part of I(d-n,0)
        // pi part of I(k,0)  = arctan_factor * 1/4
        for d in 2..=12u32 {
            for n in 1..d {
                let f = lowering_factor(key(d, n)).unwrap();
                assert_eq!(int_i(key(d, n)).c_pi, f * int_i(key(d - n, 0)).c_pi);
            }
        }
        for k in 2..=12u32 {
            assert_eq!(int_i(key(k, 0)).c_pi, arctan_factor(k).unwrap() * rat(1, 4));
        }
    }

    #[test]
    fn fj_examples() {
        let oracle = 4.0
            * simpson(|x| x * x / (x * x + 1.0).powi(3), 0.0, 1.0, 20_000)
            - 4.0 * simpson(|x| x.powi(4) / (x * x + 1.0).powi(3), 0.0, 1.0, 20_000);
        let f1 = fj_integral(1).unwrap();
        assert_eq!(f1, ExactScalar::new(rat(1, 1), rat(-1, 4), rat(0, 1)));
        assert!((f1.numeric() - oracle).abs() < 1e-12);
        for j in 1..=8 {
            let fj = fj_integral(j).unwrap();
            assert_eq!(fj.c_pi, rat(-1, 4), "j={j}");
            assert!(fj.c_invpi.is_zero());
        }
    }

    #[test]
    fn center_value_dichotomy() {
        for k in 1..=10u32 {
            let v = center_value(k).unwrap();
            assert_eq!(v.is_zero(), k % 2 == 1, "k={k}");
            assert!(v.c_pi.is_zero());
        }
        let c2 = center_value(2).unwrap();
        assert_eq!(c2, ExactScalar::new(rat(1, 1), rat(0, 1), rat(-4, 1)));
        assert!((c2.numeric() - (1.0 - 4.0 / PI)).abs() < 1e-15);
        assert!((c2.numeric() + 0.2732395).abs() < 1e-7);
    }

    #[test]
    fn center_value_matches_angular_reduction() {
        // (-4/pi) int_1^{sqrt 2} sin(4 j arccos(1/r)) dr/r; with r = sec(phi)
        // this is (-4/pi) int_0^{pi/4} sin(4 j phi) tan(phi) dphi, by Simpson
        for j in 1..=4u32 {
            let num = -4.0 / PI
                * simpson(
                    |phi| (4.0 * j as f64 * phi).sin() * phi.tan(),
                    0.0,
                    PI / 4.0,
                    20_000,
                );
            let exact = center_value(2 * j).unwrap().numeric();
            assert!((num - exact).abs() < 1e-10, "j={j}: {num} vs {exact}");
        }
    }

    #[test]
    fn sum_s_examples() {
        assert_eq!(sum_s(1).unwrap(), rat(-2, 3));
        assert_eq!(sum_s(2).unwrap(), rat(-16, 35));
        for j in 1..=10 {
            assert_eq!(suma_coefficient(j).unwrap() * sum_s(j).unwrap(), rat(-1, 1));
            assert_eq!(sum_s(j).unwrap(), sum_s_closed_form(j).unwrap());
        }
    }

    #[test]
    fn suma_identity() {
        for j in 1..=8 {
            assert_eq!(suma_lhs(j).unwrap(), rat(-1, 1), "j={j}");
        }
        assert_eq!(suma_lhs(5).unwrap(), rat(-1, 1));
        // (4j)! no longer fits in 64 bits
        assert!(factorial(24) > BigInt::from(u64::MAX));
    }

    #[test]
    fn printed_closing_formula_is_the_reciprocal() {
        // S(1) = -2/3 while -(4j)!/((2j)!(2j-1)! 2^(4j-1)) = -3/2
        let printed = -suma_coefficient(1).unwrap();
        assert_eq!(printed, rat(-3, 2));
        assert_ne!(printed, sum_s(1).unwrap());
        assert_eq!(sum_s(1).unwrap(), -suma_coefficient(1).unwrap().recip());
    }

    #[test]
    fn telescoping_examples() {
        let s0 = telescope_step(1, 0).unwrap();
        assert_eq!(s0.inner, rat(-2, 3));
        assert_eq!(s0.prefactor, rat(1, 1));
        let s1 = telescope_step(1, 1).unwrap();
        assert_eq!(s1.inner, rat(1, 3));
        assert_eq!(s1.prefactor, rat(-2, 1));
        assert_eq!(telescope_step(2, 0).unwrap().inner, rat(-16, 35));
        assert!(telescope_step(2, 4).is_err());
        for j in 1..=7 {
            let s = sum_s(j).unwrap();
            for step in 0..2 * j {
                let t = telescope_step(j, step).unwrap();
                assert_eq!(&t.prefactor * &t.inner, s, "j={j} step={step}");
            }
        }
    }

    #[test]
    fn square_moments() {
        assert_eq!(square_moment(0), rat(4, 1));
        assert_eq!(square_moment(2), rat(0, 1));
        // (x - iy)^4 = x^4 - 6x^2y^2 + y^4 (+ odd terms): 4/5 - 8/3 + 4/5
        assert_eq!(square_moment(4), rat(-16, 15));
        for n in 0..24 {
            if n % 4 != 0 {
                assert!(square_moment(n).is_zero(), "n={n}");
            }
        }
    }

    #[test]
    fn rationals_reduced() {
        for j in 1..6 {
            let q = sum_s(j).unwrap();
            assert!(q.numer().gcd(q.denom()).is_one() && q.denom().is_positive());
        }
    }

    #[test]
    fn display_and_numeric() {
        let c2 = center_value(2).unwrap();
        assert_eq!(c2.to_string(), "(1/1) + (0/1)*pi + (-4/1)/pi");
        let huge = Rational::new(factorial(200), factorial(199));
        assert!((rational_to_f64(&huge) - 200.0).abs() < 1e-9);
        assert!(ExactScalar::new(rat(0, 1), rat(0, 1), rat(1, 1)).div_pi().is_err());
    }
}
