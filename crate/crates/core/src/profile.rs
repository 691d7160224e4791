//! Closed-form initial profiles.
//!
//! A [`Profile`] is an immutable expression tree in the coordinate ρ built
//! from constants, polynomials and harmonics, closed under sums, products,
//! scaling and square roots. Values and the first two derivatives are
//! evaluated exactly through [`Jet`] arithmetic.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::jet::Jet;

#[derive(Debug, PartialEq)]
enum Node {
    Const(f64),
    /// Σ cᵢ ρⁱ
    Poly(Vec<f64>),
    Sin { amp: f64, k: f64, phase: f64 },
    Cos { amp: f64, k: f64, phase: f64 },
    Sum(Vec<Profile>),
    Product(Profile, Profile),
    Scale(f64, Profile),
    Sqrt(Profile),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Profile(Arc<Node>);

impl Profile {
    fn node(n: Node) -> Self {
        Profile(Arc::new(n))
    }

    pub fn constant(c: f64) -> Self {
        Self::node(Node::Const(c))
    }

    pub fn zero() -> Self {
        Self::constant(0.0)
    }

    /// `a·sin(kρ + φ)`
    pub fn sin(amp: f64, k: f64, phase: f64) -> Self {
        Self::node(Node::Sin { amp, k, phase })
    }

    /// `a·cos(kρ + φ)`
    pub fn cos(amp: f64, k: f64, phase: f64) -> Self {
        Self::node(Node::Cos { amp, k, phase })
    }

    /// Polynomial with coefficients in increasing degree.
    pub fn poly(coeffs: &[f64]) -> Self {
        Self::node(Node::Poly(coeffs.to_vec()))
    }

    pub fn sqrt(&self) -> Self {
        Self::node(Node::Sqrt(self.clone()))
    }

    pub fn square(&self) -> Self {
        self.clone() * self.clone()
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::node(Node::Scale(c, self.clone()))
    }

    pub fn jet(&self, rho: f64) -> Jet {
        self.eval_jet(Jet::variable(rho))
    }

    pub fn value(&self, rho: f64) -> f64 {
        self.jet(rho).v
    }

    pub fn d1(&self, rho: f64) -> f64 {
        self.jet(rho).d1
    }

    pub fn d2(&self, rho: f64) -> f64 {
        self.jet(rho).d2
    }

    fn eval_jet(&self, x: Jet) -> Jet {
        match &*self.0 {
            Node::Const(c) => Jet::constant(*c),
            Node::Poly(cs) => cs
                .iter()
                .rev()
                .fold(Jet::constant(0.0), |acc, &c| acc * x + c),
            Node::Sin { amp, k, phase } => (x * *k + *phase).sin() * *amp,
            Node::Cos { amp, k, phase } => (x * *k + *phase).cos() * *amp,
            Node::Sum(terms) => terms
                .iter()
                .fold(Jet::constant(0.0), |acc, t| acc + t.eval_jet(x)),
            Node::Product(a, b) => a.eval_jet(x) * b.eval_jet(x),
            Node::Scale(c, p) => p.eval_jet(x) * *c,
            Node::Sqrt(p) => p.eval_jet(x).sqrt(),
        }
    }

    /// Parses a sum of atoms, e.g. `cos(0.1, 1) + sin(0.05, 2, 0.3) + const(0.2) + poly(0, 1)`.
    ///
    /// `sin`/`cos` take `(amplitude, k[, phase])`, `poly` takes coefficients in
    /// increasing degree.
    pub fn parse(src: &str) -> Result<Self> {
        let mut terms = Vec::new();
        let mut depth = 0usize;
        let mut start = 0usize;
        let bytes = src.as_bytes();
        for (i, &b) in bytes.iter().enumerate() {
            match b {
                b'(' => depth += 1,
                b')' => depth = depth.saturating_sub(1),
                b'+' if depth == 0 => {
                    terms.push(parse_atom(&src[start..i])?);
                    start = i + 1;
                }
                _ => {}
            }
        }
        terms.push(parse_atom(&src[start..])?);
        Ok(if terms.len() == 1 {
            terms.pop().unwrap()
        } else {
            Self::node(Node::Sum(terms))
        })
    }
}

fn parse_atom(s: &str) -> Result<Profile> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::validation("empty profile term"));
    }
    if let Ok(c) = s.parse::<f64>() {
        return Ok(Profile::constant(c));
    }
    let open = s
        .find('(')
        .ok_or_else(|| Error::validation(format!("malformed profile term `{s}`")))?;
    if !s.ends_with(')') {
        return Err(Error::validation(format!("malformed profile term `{s}`")));
    }
    let name = s[..open].trim();
    let args = s[open + 1..s.len() - 1]
        .split(',')
        .map(|a| {
            a.trim()
                .parse::<f64>()
                .map_err(|_| Error::validation(format!("bad number `{}` in `{s}`", a.trim())))
        })
        .collect::<Result<Vec<_>>>()?;
    let harmonic = |args: &[f64]| -> Result<(f64, f64, f64)> {
        match *args {
            [a, k] => Ok((a, k, 0.0)),
            [a, k, p] => Ok((a, k, p)),
            _ => Err(Error::validation(format!("`{name}` takes 2 or 3 arguments"))),
        }
    };
    match name {
        "sin" => harmonic(&args).map(|(a, k, p)| Profile::sin(a, k, p)),
        "cos" => harmonic(&args).map(|(a, k, p)| Profile::cos(a, k, p)),
        "const" if args.len() == 1 => Ok(Profile::constant(args[0])),
        "poly" if !args.is_empty() => Ok(Profile::poly(&args)),
        _ => Err(Error::validation(format!("unknown profile term `{s}`"))),
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &*self.0 {
            Node::Const(c) => write!(f, "const({c})"),
            Node::Poly(cs) => {
                let parts: Vec<String> = cs.iter().map(|c| c.to_string()).collect();
                write!(f, "poly({})", parts.join(", "))
            }
            Node::Sin { amp, k, phase } => write!(f, "sin({amp}, {k}, {phase})"),
            Node::Cos { amp, k, phase } => write!(f, "cos({amp}, {k}, {phase})"),
            Node::Sum(ts) => {
                let parts: Vec<String> = ts.iter().map(|t| t.to_string()).collect();
                write!(f, "{}", parts.join(" + "))
            }
            Node::Product(a, b) => write!(f, "({a}) * ({b})"),
            Node::Scale(c, p) => write!(f, "{c} * ({p})"),
            Node::Sqrt(p) => write!(f, "sqrt({p})"),
        }
    }
}

impl Add for Profile {
    type Output = Profile;
    fn add(self, o: Profile) -> Profile {
        Profile::node(Node::Sum(vec![self, o]))
    }
}

impl Sub for Profile {
    type Output = Profile;
    fn sub(self, o: Profile) -> Profile {
        self + o.scale(-1.0)
    }
}

impl Mul for Profile {
    type Output = Profile;
    fn mul(self, o: Profile) -> Profile {
        Profile::node(Node::Product(self, o))
    }
}

impl Mul<f64> for Profile {
    type Output = Profile;
    fn mul(self, c: f64) -> Profile {
        self.scale(c)
    }
}

impl Add<f64> for Profile {
    type Output = Profile;
    fn add(self, c: f64) -> Profile {
        self + Profile::constant(c)
    }
}

impl Neg for Profile {
    type Output = Profile;
    fn neg(self) -> Profile {
        self.scale(-1.0)
    }
}
