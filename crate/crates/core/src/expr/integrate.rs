//! The fiber-homotopy parameter integral and single-variable antiderivatives.

use num::BigRational;

use crate::error::ExprError;
use crate::expr::atom::{Atom, Func};
use crate::expr::poly::Poly;
use crate::expr::JetExpr;

/// Expression-level antiderivative `F` with `F' = f`, as a function of `y`.
fn antiderivative_apply(f: Func, y: &JetExpr) -> JetExpr {
    match f {
        Func::Sin => JetExpr::apply(Func::Cos, y.clone()).neg(),
        Func::Cos => JetExpr::apply(Func::Sin, y.clone()),
        Func::Exp => JetExpr::apply(Func::Exp, y.clone()),
        Func::Log => y
            .mul(&JetExpr::apply(Func::Log, y.clone()))
            .sub(y),
        Func::Arctan => {
            let half = JetExpr::ratio(1, 2);
            y.mul(&JetExpr::apply(Func::Arctan, y.clone())).sub(
                &half.mul(&JetExpr::apply(
                    Func::Log,
                    JetExpr::one().add(&y.mul(y)),
                )),
            )
        }
        Func::Sqrt => JetExpr::ratio(2, 3)
            .mul(y)
            .mul(&JetExpr::apply(Func::Sqrt, y.clone())),
    }
}

/// Antiderivative of `f` as `(sign, g)` when it is again (up to sign) a table
/// function, which is what the by-parts recursion needs.
fn antiderivative_func(f: Func) -> Option<(i64, Func)> {
    match f {
        Func::Sin => Some((-1, Func::Cos)),
        Func::Cos => Some((1, Func::Sin)),
        Func::Exp => Some((1, Func::Exp)),
        _ => None,
    }
}

fn contains_param(e: &JetExpr) -> bool {
    e.contains_param()
}

impl JetExpr {
    /// Exact `\int_0^1 e dt` over the reserved scaling parameter.
    ///
    /// Supported: expressions polynomial in `t`, and monomials carrying a
    /// single opaque factor `f(arg)` with `arg` affine in `t` (by parts for
    /// positive powers of `t` when the table is closed). Anything else is a
    /// loud `NonIntegrable`; the caller decides on a fallback.
    pub fn integrate_param(&self) -> Result<JetExpr, ExprError> {
        if self.is_zero() {
            return Ok(JetExpr::zero());
        }
        let den = JetExpr::from_poly(self.den().clone());
        if contains_param(&den) {
            return Err(ExprError::NonIntegrable(
                "denominator depends on the scaling parameter".into(),
            ));
        }
        let mut acc = JetExpr::zero();
        for (m, c) in self.num().terms() {
            let mut k = 0u32;
            let mut opaque: Option<(Func, JetExpr, u32)> = None;
            let mut rest = Vec::new();
            for (a, e) in m.pairs() {
                match a {
                    Atom::Param => k = *e,
                    Atom::Apply(f, arg) if contains_param(arg) => {
                        if opaque.is_some() {
                            return Err(ExprError::NonIntegrable(format!(
                                "two parameter-dependent opaque factors in `{}`",
                                JetExpr::from_poly(Poly::term(c.clone(), m.clone())).debug_text()
                            )));
                        }
                        opaque = Some((*f, arg.as_ref().clone(), *e));
                    }
                    _ => rest.push((a.clone(), *e)),
                }
            }
            let free = JetExpr::from_poly(Poly::term(
                c.clone(),
                crate::expr::poly::Monomial::from_pairs(rest),
            ));
            let integral = match opaque {
                None => {
                    // int_0^1 t^k dt = 1/(k+1)
                    let w = BigRational::new(1.into(), (k as i64 + 1).into());
                    free.scale(&w)
                }
                Some((f, arg, 1)) => {
                    let (beta, h) = split_affine_param(&arg)?;
                    free.mul(&param_power_integral(k, f, &beta, &h)?)
                }
                Some((_, _, _)) => {
                    return Err(ExprError::NonIntegrable(format!(
                        "opaque factor raised to a power in `{}`",
                        JetExpr::from_poly(Poly::term(c.clone(), m.clone())).debug_text()
                    )))
                }
            };
            acc = acc.add(&integral);
        }
        acc.div(&den)
    }
}

/// Split `arg = beta + h t` with `beta`, `h` parameter-free.
fn split_affine_param(arg: &JetExpr) -> Result<(JetExpr, JetExpr), ExprError> {
    let beta = arg.substitute_param(&JetExpr::zero());
    let h = arg.partial(&Atom::Param);
    if contains_param(&h) || contains_param(&beta) {
        return Err(ExprError::NonIntegrable(format!(
            "opaque argument `{}` is not affine in the parameter",
            arg.debug_text()
        )));
    }
    // Exactness check.
    let rebuilt = beta.add(&h.mul(&JetExpr::param()));
    if !rebuilt.sub(arg).is_zero() {
        return Err(ExprError::NonIntegrable(format!(
            "opaque argument `{}` is not affine in the parameter",
            arg.debug_text()
        )));
    }
    if h.is_zero() {
        return Err(ExprError::NonIntegrable(
            "parameter-free argument classified as parameter-dependent".into(),
        ));
    }
    Ok((beta, h))
}

/// `\int_0^1 t^k f(beta + h t) dt` by parts.
fn param_power_integral(
    k: u32,
    f: Func,
    beta: &JetExpr,
    h: &JetExpr,
) -> Result<JetExpr, ExprError> {
    let y1 = beta.add(h);
    if k == 0 {
        let big_f1 = antiderivative_apply(f, &y1);
        let big_f0 = antiderivative_apply(f, beta);
        return big_f1.sub(&big_f0).div(h);
    }
    let (sign, g) = antiderivative_func(f).ok_or_else(|| {
        ExprError::NonIntegrable(format!(
            "no by-parts antiderivative for {} with a positive parameter power",
            f.name()
        ))
    })?;
    // int t^k f = [t^k F/h]_0^1 - (k/h) int t^(k-1) F,  F = sign * g.
    let sgn = JetExpr::integer(sign);
    let boundary = sgn.mul(&JetExpr::apply(g, y1)).div(h)?;
    let tail = param_power_integral(k - 1, g, beta, h)?;
    let kq = JetExpr::integer(k as i64);
    Ok(boundary.sub(&kq.mul(&sgn).mul(&tail).div(h)?))
}

/// Single-variable antiderivative with respect to a coordinate atom: exact on
/// polynomials in the variable, on `g * f(alpha var + beta)` with a table
/// antiderivative, on by-parts combinations `var^k f(...)` for sin/cos/exp,
/// and on `g / var` (logarithm). Everything else is a loud error.
pub fn antiderivative_in(e: &JetExpr, var: &Atom) -> Result<JetExpr, ExprError> {
    if e.is_zero() {
        return Ok(JetExpr::zero());
    }
    let den = JetExpr::from_poly(e.den().clone());
    let den_has_var = den.collect_atoms().contains(var);
    if den_has_var {
        // Try g / var with g free of the variable.
        let var_expr = JetExpr::from_poly(Poly::atom(var.clone()));
        let g = e.mul(&var_expr);
        if !g.collect_atoms().contains(var) {
            return Ok(g.mul(&JetExpr::apply(Func::Log, var_expr)));
        }
        return Err(ExprError::NoAntiderivative(format!(
            "denominator of `{}` depends on the variable",
            e.debug_text()
        )));
    }
    let mut acc = JetExpr::zero();
    for (m, c) in e.num().terms() {
        let mut k = 0u32;
        let mut opaque: Option<(Func, JetExpr)> = None;
        let mut rest = Vec::new();
        for (a, exp) in m.pairs() {
            if a == var {
                k = *exp;
                continue;
            }
            let depends = match a {
                Atom::Apply(_, arg) => arg.collect_atoms().contains(var),
                _ => false,
            };
            if depends {
                if opaque.is_some() || *exp != 1 {
                    return Err(ExprError::NoAntiderivative(format!(
                        "unsupported shape `{}`",
                        JetExpr::from_poly(Poly::term(c.clone(), m.clone())).debug_text()
                    )));
                }
                let Atom::Apply(f, arg) = a else { unreachable!() };
                opaque = Some((*f, arg.as_ref().clone()));
            } else {
                rest.push((a.clone(), *exp));
            }
        }
        let free = JetExpr::from_poly(Poly::term(
            c.clone(),
            crate::expr::poly::Monomial::from_pairs(rest),
        ));
        let piece = match opaque {
            None => {
                // var^k -> var^(k+1)/(k+1)
                let var_expr = JetExpr::from_poly(Poly::atom(var.clone()));
                let w = BigRational::new(1.into(), (k as i64 + 1).into());
                free.mul(&var_expr.pow(k as i64 + 1)?).scale(&w)
            }
            Some((f, arg)) => {
                let (alpha, beta) = split_affine_var(&arg, var)?;
                free.mul(&var_power_integral(k, f, &alpha, &beta, var)?)
            }
        };
        acc = acc.add(&piece);
    }
    acc.div(&den)
}

/// Split `arg = alpha var + beta` with both parts free of `var`.
fn split_affine_var(arg: &JetExpr, var: &Atom) -> Result<(JetExpr, JetExpr), ExprError> {
    let alpha = arg.partial(var);
    if alpha.collect_atoms().contains(var) {
        return Err(ExprError::NoAntiderivative(format!(
            "argument `{}` is not affine in the variable",
            arg.debug_text()
        )));
    }
    let var_expr = JetExpr::from_poly(Poly::atom(var.clone()));
    let beta = arg.sub(&alpha.mul(&var_expr));
    if beta.collect_atoms().contains(var) {
        return Err(ExprError::NoAntiderivative(format!(
            "argument `{}` is not affine in the variable",
            arg.debug_text()
        )));
    }
    if alpha.is_zero() {
        return Err(ExprError::NoAntiderivative(
            "variable-free argument classified as variable-dependent".into(),
        ));
    }
    Ok((alpha, beta))
}

/// Indefinite `\int var^k f(alpha var + beta) dvar`.
fn var_power_integral(
    k: u32,
    f: Func,
    alpha: &JetExpr,
    beta: &JetExpr,
    var: &Atom,
) -> Result<JetExpr, ExprError> {
    let var_expr = JetExpr::from_poly(Poly::atom(var.clone()));
    let arg = alpha.mul(&var_expr).add(beta);
    if k == 0 {
        return antiderivative_apply(f, &arg).div(alpha);
    }
    let (sign, g) = antiderivative_func(f).ok_or_else(|| {
        ExprError::NoAntiderivative(format!(
            "no by-parts antiderivative for {} against a power of the variable",
            f.name()
        ))
    })?;
    let sgn = JetExpr::integer(sign);
    let big_f = sgn.mul(&JetExpr::apply(g, arg));
    let boundary = var_expr.pow(k as i64)?.mul(&big_f).div(alpha)?;
    let tail = var_power_integral(k - 1, g, alpha, beta, var)?;
    let kq = JetExpr::integer(k as i64);
    Ok(boundary.sub(&kq.mul(&sgn).mul(&tail).div(alpha)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sig::MultiIndex;

    fn uxx() -> JetExpr {
        JetExpr::jet(0, MultiIndex::new(vec![0, 0]))
    }

    fn u() -> JetExpr {
        JetExpr::fiber(0)
    }

    #[test]
    fn power_integrals() {
        // int_0^1 t u_xx dt = u_xx / 2
        let t = JetExpr::param();
        let e = t.mul(&uxx());
        assert_eq!(e.integrate_param().unwrap(), uxx().scale(&BigRational::new(1.into(), 2.into())));
        // int_0^1 t^2 u^3 dt = u^3/3
        let e = t.mul(&t).mul(&u().pow(3).unwrap());
        assert_eq!(
            e.integrate_param().unwrap(),
            u().pow(3).unwrap().scale(&BigRational::new(1.into(), 3.into()))
        );
        // int_0^1 0 dt = 0
        assert!(JetExpr::zero().integrate_param().unwrap().is_zero());
    }

    #[test]
    fn opaque_linear_argument() {
        // int_0^1 sin(t u) dt = (1 - cos(u))/u
        let t = JetExpr::param();
        let e = JetExpr::apply(Func::Sin, t.mul(&u()));
        let got = e.integrate_param().unwrap();
        let expected = JetExpr::one()
            .sub(&JetExpr::apply(Func::Cos, u()))
            .div(&u())
            .unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn by_parts_with_positive_power() {
        // int_0^1 t exp(t u) dt = ((u-1)exp(u) + 1)/u^2
        let t = JetExpr::param();
        let e = t.mul(&JetExpr::apply(Func::Exp, t.mul(&u())));
        let got = e.integrate_param().unwrap();
        let eu = JetExpr::apply(Func::Exp, u());
        let expected = u()
            .sub(&JetExpr::one())
            .mul(&eu)
            .add(&JetExpr::one())
            .div(&u().mul(&u()))
            .unwrap();
        assert_eq!(got, expected);
    }

    #[test]
    fn nonintegrable_is_loud() {
        // log has no by-parts closure against t^k.
        let t = JetExpr::param();
        let e = t.mul(&JetExpr::apply(Func::Log, t.mul(&u())));
        assert!(matches!(
            e.integrate_param(),
            Err(ExprError::NonIntegrable(_))
        ));
    }

    #[test]
    fn antiderivatives() {
        let var = Atom::Jet {
            fiber: 0,
            index: MultiIndex::empty(),
        };
        // int u^2 du = u^3/3
        let a = antiderivative_in(&u().mul(&u()), &var).unwrap();
        assert_eq!(a, u().pow(3).unwrap().scale(&BigRational::new(1.into(), 3.into())));
        // int sin(u) du = -cos(u)
        let a = antiderivative_in(&JetExpr::apply(Func::Sin, u()), &var).unwrap();
        assert_eq!(a, JetExpr::apply(Func::Cos, u()).neg());
        // int 1/u du = log(u)
        let a = antiderivative_in(&JetExpr::one().div(&u()).unwrap(), &var).unwrap();
        assert_eq!(a, JetExpr::apply(Func::Log, u()));
        // int u sin(u) du = sin(u) - u cos(u)
        let a = antiderivative_in(&u().mul(&JetExpr::apply(Func::Sin, u())), &var).unwrap();
        let expected = JetExpr::apply(Func::Sin, u()).sub(&u().mul(&JetExpr::apply(Func::Cos, u())));
        assert_eq!(a, expected);
    }

    #[test]
    fn antiderivative_checked_by_derivative() {
        // Differentiating the antiderivative returns the integrand.
        let var = Atom::Jet {
            fiber: 0,
            index: MultiIndex::empty(),
        };
        let x = JetExpr::base(0);
        let integrand = u()
            .mul(&JetExpr::apply(Func::Exp, x.mul(&u())))
            .add(&u().mul(&u()));
        let anti = antiderivative_in(&integrand, &var).unwrap();
        assert!(anti.partial(&var).sub(&integrand).is_zero());
    }
}
