//! Closed-form scalar expressions in `x`, `y`, `z` and `theta`.
//!
//! The grammar is whatever `meval` accepts: numbers, `pi`, `e`, the four
//! arithmetic operators, `^`, parentheses and the usual elementary functions
//! (`sin`, `cos`, `exp`, `abs`, `sqrt`, ...).

use std::fmt;

use crate::error::{Error, Result};

thread_local! {
    static BUILTINS: meval::Context<'static> = meval::Context::new();
}

#[derive(Clone)]
pub struct Expression {
    source: String,
    expr: meval::Expr,
}

impl fmt::Debug for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_tuple("Expression").field(&self.source).finish()
    }
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self> {
        let expr: meval::Expr = source
            .parse()
            .map_err(|e: meval::Error| Error::Expression {
                expr: source.to_string(),
                msg: e.to_string(),
            })?;
        let parsed = Expression {
            source: source.to_string(),
            expr,
        };
        // Surface unknown variables and functions now rather than mid-run.
        parsed.try_eval(&[0.25, 0.5, 0.75], 0.5)?;
        Ok(parsed)
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    fn try_eval(&self, x: &[f64], theta: f64) -> Result<f64> {
        let coord = |i: usize| x.get(i).copied().unwrap_or(0.0);
        let vars = [
            ("x", coord(0)),
            ("y", coord(1)),
            ("z", coord(2)),
            ("theta", theta),
        ];
        BUILTINS
            .with(|ctx| self.expr.eval_with_context((vars, ctx)))
            .map_err(|e| Error::Expression {
                expr: self.source.clone(),
                msg: e.to_string(),
            })
    }

    /// Evaluates at the point `x` (missing coordinates read as zero) with the
    /// given boundary angle.
    pub fn eval(&self, x: &[f64], theta: f64) -> f64 {
        self.try_eval(x, theta).unwrap_or(f64::NAN)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_the_test_field_grammar() {
        let e = Expression::parse("x^2 - y^2 + 2*sin(pi*z) - abs(cos(theta))/exp(0)").unwrap();
        let v = e.eval(&[1.0, 0.5, 0.0], 0.0);
        assert!((v - (1.0 - 0.25 - 1.0)).abs() < 1e-15);
        assert_eq!(Expression::parse("3").unwrap().eval(&[], 0.0), 3.0);
    }

    #[test]
    fn rejects_unknown_names() {
        assert!(Expression::parse("x + w").is_err());
        assert!(Expression::parse("frobnicate(x)").is_err());
        assert!(Expression::parse("x +").is_err());
    }
}
