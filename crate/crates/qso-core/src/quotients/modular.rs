//! Gaussian integers modulo primes `p ≡ 3 (mod 4)`, used to run the
//! quotient construction fast and lift the result back to exact Gaussian
//! rationals by Chinese remaindering and rational reconstruction.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::freealg::Word;
use crate::linalg::Matrix;
use crate::qscalar::{GaussRat, Poly, QScalar};
use crate::ring::{Coeff, FromQScalar, QTwo};

/// Primes below `2^62`, all `≡ 3 (mod 4)`, so `x^2 + 1` is irreducible.
pub const PRIMES: [u64; 8] = [
    4611686018427387847,
    4611686018427387787,
    4611686018427387751,
    4611686018427387631,
    4611686018427387587,
    4611686018427387323,
    4611686018427387271,
    4611686018427387139,
];

/// `a + b i` in `F_p[i]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp2<const P: u64> {
    pub a: u64,
    pub b: u64,
}

fn mulmod(x: u64, y: u64, p: u64) -> u64 {
    ((x as u128 * y as u128) % p as u128) as u64
}

fn addmod(x: u64, y: u64, p: u64) -> u64 {
    let s = x as u128 + y as u128;
    (s % p as u128) as u64
}

fn submod(x: u64, y: u64, p: u64) -> u64 {
    if x >= y {
        x - y
    } else {
        p - (y - x)
    }
}

fn powmod(mut x: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, x, p);
        }
        x = mulmod(x, x, p);
        e >>= 1;
    }
    r
}

fn big_mod(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p))
        .to_u64()
        .expect("reduced below p")
}

fn rat_mod(x: &BigRational, p: u64) -> Result<u64> {
    let d = big_mod(x.denom(), p);
    if d == 0 {
        return Err(Error::DivisionByZero);
    }
    Ok(mulmod(big_mod(x.numer(), p), powmod(d, p - 2, p), p))
}

impl<const P: u64> Fp2<P> {
    pub fn from_gauss(x: &GaussRat) -> Result<Self> {
        Ok(Fp2 {
            a: rat_mod(&x.re, P)?,
            b: rat_mod(&x.im, P)?,
        })
    }

    fn pow(&self, mut e: i64) -> Result<Self> {
        let mut base = if e < 0 {
            e = -e;
            Coeff::div(&Self::one(), self)?
        } else {
            *self
        };
        let mut r = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                r = r.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        Ok(r)
    }
}

impl<const P: u64> Coeff for Fp2<P> {
    fn zero() -> Self {
        Fp2 { a: 0, b: 0 }
    }
    fn one() -> Self {
        Fp2 { a: 1, b: 0 }
    }
    fn from_i64(n: i64) -> Self {
        Fp2 {
            a: n.rem_euclid(P as i64) as u64,
            b: 0,
        }
    }
    fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }
    fn add(&self, o: &Self) -> Self {
        Fp2 {
            a: addmod(self.a, o.a, P),
            b: addmod(self.b, o.b, P),
        }
    }
    fn sub(&self, o: &Self) -> Self {
        Fp2 {
            a: submod(self.a, o.a, P),
            b: submod(self.b, o.b, P),
        }
    }
    fn mul(&self, o: &Self) -> Self {
        let ac = mulmod(self.a, o.a, P);
        let bd = mulmod(self.b, o.b, P);
        let ad = mulmod(self.a, o.b, P);
        let bc = mulmod(self.b, o.a, P);
        Fp2 {
            a: submod(ac, bd, P),
            b: addmod(ad, bc, P),
        }
    }
    fn neg(&self) -> Self {
        Self::zero().sub(self)
    }
    fn div(&self, o: &Self) -> Result<Self> {
        let norm = addmod(mulmod(o.a, o.a, P), mulmod(o.b, o.b, P), P);
        if norm == 0 {
            return Err(Error::DivisionByZero);
        }
        let inv = powmod(norm, P - 2, P);
        let conj = Fp2 {
            a: mulmod(o.a, inv, P),
            b: mulmod(submod(0, o.b, P), inv, P),
        };
        Ok(self.mul(&conj))
    }
    fn magnitude(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            1.0
        }
    }
}

impl<const P: u64> QTwo for Fp2<P> {
    fn q_two(s: &Self) -> Result<Self> {
        let q = s.mul(s);
        Ok(q.add(&Coeff::div(&Self::one(), &q)?))
    }
}

fn eval_poly<const P: u64>(p: &Poly, s: &Fp2<P>) -> Result<Fp2<P>> {
    let mut acc = Fp2::zero();
    for (m, c) in p.terms() {
        acc = acc.add(&Fp2::from_gauss(c)?.mul(&s.pow(m[0] as i64)?));
    }
    Ok(acc)
}

impl<const P: u64> FromQScalar for Fp2<P> {
    fn specialize(x: &QScalar, s: &Self) -> Result<Self> {
        if !x.is_univariate() {
            return Err(Error::Domain(format!(
                "unsubstituted weight variables in {x}"
            )));
        }
        let d = eval_poly(x.den(), s)?;
        if d.is_zero() {
            return Err(Error::Pole(format!("denominator of {x} vanishes mod {P}")));
        }
        Coeff::div(&eval_poly(x.num(), s)?, &d)
    }
}

/// A quotient computed modulo one prime: basis words and generator
/// matrices with entries `(a, b)` for `a + b i`.
#[derive(Clone, Debug, PartialEq)]
pub struct Residues {
    pub prime: u64,
    pub basis: Vec<Word>,
    pub mats: Vec<Matrix<GaussRat>>,
}

pub fn residues<const P: u64>(basis: Vec<Word>, mats: &[Matrix<Fp2<P>>]) -> Result<Residues> {
    let mats = mats
        .iter()
        .map(|m| {
            m.map(|x| {
                Ok(GaussRat::new(
                    BigRational::from_integer(x.a.into()),
                    BigRational::from_integer(x.b.into()),
                ))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Residues {
        prime: P,
        basis,
        mats,
    })
}

/// `a/b` with `a ≡ b r (mod m)` and `|a|, |b| <= sqrt(m/2)`.
fn reconstruct(r: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / BigInt::from(2)).sqrt();
    let (mut r0, mut r1) = (m.clone(), r.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// Combine residues modulo distinct primes into `(value mod M, M)`.
fn crt(parts: &[(u64, u64)]) -> (BigInt, BigInt) {
    let mut x = BigInt::zero();
    let mut m = BigInt::one();
    for &(r, p) in parts {
        let pb = BigInt::from(p);
        let xm = big_mod(&x, p);
        let minv = powmod(big_mod(&m, p), p - 2, p);
        let t = mulmod(submod(r, xm, p), minv, p);
        x += &m * BigInt::from(t);
        m *= pb;
    }
    (x, m)
}

fn part(x: &BigRational) -> u64 {
    x.to_integer().to_u64().expect("residue")
}

/// Lift residue matrices to Gaussian rationals; `None` if some entry does
/// not reconstruct yet.
pub fn lift(res: &[Residues]) -> Option<Vec<Matrix<GaussRat>>> {
    let first = res.first()?;
    let mut out = Vec::with_capacity(first.mats.len());
    for (g, m0) in first.mats.iter().enumerate() {
        let mut rows = Vec::with_capacity(m0.rows());
        for i in 0..m0.rows() {
            let mut row = Vec::with_capacity(m0.cols());
            for j in 0..m0.cols() {
                let re: Vec<(u64, u64)> = res
                    .iter()
                    .map(|r| (part(&r.mats[g].get(i, j).re), r.prime))
                    .collect();
                let im: Vec<(u64, u64)> = res
                    .iter()
                    .map(|r| (part(&r.mats[g].get(i, j).im), r.prime))
                    .collect();
                let (xr, m) = crt(&re);
                let (xi, _) = crt(&im);
                row.push(GaussRat::new(reconstruct(&xr, &m)?, reconstruct(&xi, &m)?));
            }
            rows.push(row);
        }
        out.push(if rows.is_empty() {
            Matrix::zeros(0, 0)
        } else {
            Matrix::from_rows(rows).ok()?
        });
    }
    Some(out)
}

/// Do exact matrices reduce to the given residues?
pub fn agrees(exact: &[Matrix<GaussRat>], res: &Residues) -> bool {
    let p = res.prime;
    exact.iter().zip(&res.mats).all(|(e, r)| {
        (0..e.rows()).all(|i| {
            (0..e.cols()).all(|j| {
                let x = e.get(i, j);
                let y = r.get(i, j);
                matches!(
                    (rat_mod(&x.re, p), rat_mod(&x.im, p)),
                    (Ok(a), Ok(b)) if a == part(&y.re) && b == part(&y.im)
                )
            })
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qscalar::rat;

    type F = Fp2<{ PRIMES[0] }>;

    #[test]
    fn field_arithmetic() {
        let x = F::from_gauss(&GaussRat::new(rat(3, 7), rat(-2, 5))).unwrap();
        let y = Coeff::div(&F::one(), &x).unwrap();
        assert_eq!(x.mul(&y), F::one());
        let i = F::from_gauss(&GaussRat::i()).unwrap();
        assert_eq!(i.mul(&i), F::from_i64(-1));
    }

    #[test]
    fn rational_reconstruction() {
        let v = GaussRat::new(rat(-123456789, 98765), rat(17, 3));
        let res: Vec<Residues> = PRIMES[..2]
            .iter()
            .map(|&p| {
                let g = GaussRat::new(
                    BigRational::from_integer(rat_mod(&v.re, p).unwrap().into()),
                    BigRational::from_integer(rat_mod(&v.im, p).unwrap().into()),
                );
                Residues {
                    prime: p,
                    basis: vec![],
                    mats: vec![Matrix::from_rows(vec![vec![g]]).unwrap()],
                }
            })
            .collect();
        let lifted = lift(&res).unwrap();
        assert_eq!(lifted[0].get(0, 0), &v);
        assert!(agrees(&lifted, &res[1]));
    }

    #[test]
    fn specialize_matches_exact() {
        let x = QScalar::bracket_int(5) / QScalar::curly(&rat(3, 2)).unwrap();
        let s = GaussRat::from_int(2);
        let exact = x.eval_exact(&s).unwrap();
        let m = F::specialize(&x, &F::from_gauss(&s).unwrap()).unwrap();
        assert_eq!(m, F::from_gauss(&exact).unwrap());
    }
}
