//! Truncated Taylor (jet) arithmetic.
//!
//! A jet holds the Taylor coefficients of a function at a point up to a fixed
//! order; sums, products (Cauchy), quotients and the lifts of exp/ln/power
//! follow the standard recurrences and are exact for polynomial inputs up to
//! the jet order. Jets exist to evaluate iterated radial Laplacians of
//! closed-form profiles without symbolic differentiation.

use crate::expr::{Node, NonlinearityExpr};

/// Maximum supported order (value plus 16 derivatives).
pub const MAX_ORDER: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet {
    /// Taylor coefficients c_i = f^{(i)}(x0)/i!.
    coeffs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum JetError {
    #[error("jet arithmetic overflowed")]
    Overflow,
    #[error("ln of non-positive jet value {0}")]
    LnDomain(f64),
    #[error("power of jet produced NaN (base {base}, exponent {exponent})")]
    PowerDomain { base: f64, exponent: f64 },
    #[error("division by a jet with zero value")]
    DivByZero,
    #[error("jet order {order} insufficient: {need} required")]
    InsufficientOrder { order: usize, need: usize },
    #[error("odd radial profile at r = 0: first derivative {0} does not vanish")]
    NotEvenAtZero(f64),
}

impl Jet {
    pub fn constant(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        Jet { coeffs }
    }

    pub fn variable(value: f64, order: usize) -> Self {
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = value;
        if order >= 1 {
            coeffs[1] = 1.0;
        }
        Jet { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> f64 {
        self.coeffs[0]
    }

    /// i-th derivative (not the raw coefficient).
    pub fn derivative(&self, i: usize) -> f64 {
        self.coeffs[i] * factorial(i)
    }

    /// All derivatives d^0 f .. d^order f.
    pub fn derivs(&self) -> Vec<f64> {
        (0..self.coeffs.len()).map(|i| self.derivative(i)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    fn check(self) -> Result<Jet, JetError> {
        if self.is_finite() {
            Ok(self)
        } else {
            Err(JetError::Overflow)
        }
    }

    pub fn truncate(&self, order: usize) -> Jet {
        Jet {
            coeffs: self.coeffs[..=order.min(self.order())].to_vec(),
        }
    }

    pub fn add(&self, other: &Jet) -> Result<Jet, JetError> {
        let order = self.order().min(other.order());
        let coeffs = (0..=order)
            .map(|i| self.coeffs[i] + other.coeffs[i])
            .collect();
        Jet { coeffs }.check()
    }

    pub fn scale(&self, c: f64) -> Result<Jet, JetError> {
        Jet {
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
        .check()
    }

    pub fn mul(&self, other: &Jet) -> Result<Jet, JetError> {
        let order = self.order().min(other.order());
        let mut coeffs = vec![0.0; order + 1];
        for (k, c) in coeffs.iter_mut().enumerate() {
            for j in 0..=k {
                *c += self.coeffs[j] * other.coeffs[k - j];
            }
        }
        Jet { coeffs }.check()
    }

    pub fn div(&self, other: &Jet) -> Result<Jet, JetError> {
        if other.coeffs[0] == 0.0 {
            return Err(JetError::DivByZero);
        }
        let order = self.order().min(other.order());
        let mut coeffs = vec![0.0; order + 1];
        for k in 0..=order {
            let mut acc = self.coeffs[k];
            for j in 1..=k {
                acc -= other.coeffs[j] * coeffs[k - j];
            }
            coeffs[k] = acc / other.coeffs[0];
        }
        Jet { coeffs }.check()
    }

    pub fn exp(&self) -> Result<Jet, JetError> {
        let order = self.order();
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = self.coeffs[0].exp();
        for k in 1..=order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += j as f64 * self.coeffs[j] * coeffs[k - j];
            }
            coeffs[k] = acc / k as f64;
        }
        Jet { coeffs }.check()
    }

    pub fn ln(&self) -> Result<Jet, JetError> {
        if self.coeffs[0] <= 0.0 {
            return Err(JetError::LnDomain(self.coeffs[0]));
        }
        let order = self.order();
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = self.coeffs[0].ln();
        for k in 1..=order {
            let mut acc = self.coeffs[k];
            for j in 1..k {
                acc -= (j as f64 / k as f64) * coeffs[j] * self.coeffs[k - j];
            }
            coeffs[k] = acc / self.coeffs[0];
        }
        Jet { coeffs }.check()
    }

    pub fn powf(&self, p: f64) -> Result<Jet, JetError> {
        let f0 = self.coeffs[0];
        let h0 = f0.powf(p);
        if h0.is_nan() {
            return Err(JetError::PowerDomain {
                base: f0,
                exponent: p,
            });
        }
        if f0 == 0.0 {
            // only exact monomials survive; handle the polynomial case p ∈ ℕ
            // via repeated multiplication, otherwise the jet is singular
            if p >= 0.0 && p.fract() == 0.0 && p <= 8.0 {
                let mut acc = Jet::constant(1.0, self.order());
                for _ in 0..p as usize {
                    acc = acc.mul(self)?;
                }
                return Ok(acc);
            }
            return Err(JetError::PowerDomain {
                base: f0,
                exponent: p,
            });
        }
        let order = self.order();
        let mut coeffs = vec![0.0; order + 1];
        coeffs[0] = h0;
        for k in 1..=order {
            let mut acc = 0.0;
            for j in 1..=k {
                acc += ((p + 1.0) * j as f64 - k as f64) * self.coeffs[j] * coeffs[k - j];
            }
            coeffs[k] = acc / (k as f64 * f0);
        }
        Jet { coeffs }.check()
    }

    /// Jet of the derivative f'; the order drops by one.
    pub fn derivative_jet(&self) -> Result<Jet, JetError> {
        if self.order() == 0 {
            return Err(JetError::InsufficientOrder { order: 0, need: 1 });
        }
        let coeffs = (1..self.coeffs.len())
            .map(|i| i as f64 * self.coeffs[i])
            .collect();
        Ok(Jet { coeffs })
    }

    /// Jet of f(r)/r at r = 0 for f with f(0) = 0 (coefficient shift); the
    /// order drops by one.
    pub fn div_by_variable_at_zero(&self) -> Result<Jet, JetError> {
        let scale = self
            .coeffs
            .iter()
            .map(|c| c.abs())
            .fold(0.0f64, f64::max)
            .max(1.0);
        if self.coeffs[0].abs() > 1e-12 * scale {
            return Err(JetError::NotEvenAtZero(self.coeffs[0]));
        }
        if self.order() == 0 {
            return Err(JetError::InsufficientOrder { order: 0, need: 1 });
        }
        Ok(Jet {
            coeffs: self.coeffs[1..].to_vec(),
        })
    }
}

fn factorial(i: usize) -> f64 {
    (1..=i).map(|k| k as f64).product()
}

/// Evaluate an expression tree in jet arithmetic, reading the variable as the
/// radius seeded at `r`.
pub fn jet_eval(expr: &NonlinearityExpr, r: f64, order: usize) -> Result<Jet, JetError> {
    assert!(
        order <= MAX_ORDER,
        "jet order {order} exceeds the supported maximum {MAX_ORDER}"
    );
    eval_node(&expr.root, r, order)
}

fn eval_node(node: &Node, r: f64, order: usize) -> Result<Jet, JetError> {
    match node {
        Node::Const(c) => Ok(Jet::constant(*c, order)),
        Node::Var => Ok(Jet::variable(r, order)),
        Node::Sum(a, b) => eval_node(a, r, order)?.add(&eval_node(b, r, order)?),
        Node::Product(a, b) => eval_node(a, r, order)?.mul(&eval_node(b, r, order)?),
        Node::Power(base, p) => eval_node(base, r, order)?.powf(*p),
        Node::Ln(a) => eval_node(a, r, order)?.ln(),
        Node::Exp(a) => eval_node(a, r, order)?.exp(),
    }
}

/// (Δ^{half_m} f)(r) for a radial profile f given as a closed-form expression,
/// computed by `half_m` applications of Δf = f'' + (n-1) f'/r on jets of
/// order 2·half_m. At r = 0 the removable singularity is resolved by the
/// coefficient shift (which also checks evenness of the profile).
pub fn apply_polyharmonic(
    expr: &NonlinearityExpr,
    n: u32,
    half_m: u32,
    r: f64,
) -> Result<f64, JetError> {
    let order = 2 * half_m as usize;
    if order > MAX_ORDER {
        return Err(JetError::InsufficientOrder {
            order: MAX_ORDER,
            need: order,
        });
    }
    let mut cur = jet_eval(expr, r, order)?;
    for _ in 0..half_m {
        let k = cur.order();
        if k < 2 {
            return Err(JetError::InsufficientOrder { order: k, need: 2 });
        }
        let d1 = cur.derivative_jet()?;
        let d2 = d1.derivative_jet()?;
        let ratio = if r > 0.0 {
            d1.div(&Jet::variable(r, d1.order()))?.truncate(k - 2)
        } else {
            d1.div_by_variable_at_zero()?
        };
        cur = d2.add(&ratio.scale((n - 1) as f64)?)?;
    }
    Ok(cur.value())
}
