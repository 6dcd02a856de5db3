//! Exact big-integer values of the size bounds of the pumping argument.

use num_bigint::BigUint;
use serde::{Serialize, Serializer};

use super::MovieError;

/// Largest argument a factorial is evaluated for.
const MAX_FACTORIAL: u64 = 20_000;
/// Largest bit length a power is evaluated to.
const MAX_BITS: u64 = 1 << 22;

pub const BOUND_NAMES: [&str; 6] = ["f_b", "B_seed", "B_d_init", "B_d", "B_s", "N_cagefree"];

/// Parameters of the bounds: `|T|`, `|σ|`, and the per-bound `n`, `w`, `h`, `‖v‖₁`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct BoundParams {
    pub tiles: Option<u64>,
    pub seed: Option<u64>,
    pub n: Option<u64>,
    pub w: Option<u64>,
    pub h: Option<u64>,
    pub v_l1: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub name: String,
    pub formula: String,
    #[serde(serialize_with = "decimal")]
    pub value: BigUint,
}

fn decimal<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

fn factorial(name: &str, n: &BigUint) -> Result<BigUint, MovieError> {
    let n = u64::try_from(n)
        .ok()
        .filter(|&n| n <= MAX_FACTORIAL)
        .ok_or_else(|| MovieError::TooLarge { name: name.into(), reason: format!("factorial of {n}") })?;
    Ok((2..=n).fold(BigUint::from(1u32), |acc, k| acc * k))
}

fn power(name: &str, base: u64, exp: u64) -> Result<BigUint, MovieError> {
    let bits = 64 - base.leading_zeros() as u64;
    if exp.saturating_mul(bits) > MAX_BITS {
        return Err(MovieError::TooLarge { name: name.into(), reason: format!("{base}^{exp}") });
    }
    let exp = u32::try_from(exp).map_err(|_| MovieError::TooLarge { name: name.into(), reason: format!("{base}^{exp}") })?;
    Ok(BigUint::from(base).pow(exp))
}

/// Evaluates the named bound exactly.
pub fn bound(name: &str, params: &BoundParams) -> Result<BoundReport, MovieError> {
    let get = |v: Option<u64>, param: &'static str| v.ok_or(MovieError::MissingParameter { name: name.into(), param });
    let big = BigUint::from;
    let (formula, value) = match name {
        "f_b" => {
            let (t, n) = (get(params.tiles, "tiles")?, get(params.n, "n")?);
            ("((|T|+1)^n)! + 1", factorial(name, &power(name, t + 1, n)?)? + 1u32)
        }
        "B_seed" => {
            let (t, s) = (get(params.tiles, "tiles")?, get(params.seed, "seed")?);
            ("2|T| + |σ|", big(2 * t + s))
        }
        "B_d_init" => ("2|T| + 2", big(2 * get(params.tiles, "tiles")? + 2)),
        "B_d" => {
            let (t, s) = (get(params.tiles, "tiles")?, get(params.seed, "seed")?);
            ("|σ| + (3|T| + |σ| + 5)|T| + 1", big(s) + big(3 * t + s + 5) * t + 1u32)
        }
        "B_s" => {
            let (t, w, h) = (get(params.tiles, "tiles")?, get(params.w, "w")?, get(params.h, "h")?);
            ("(2|T|)^(w+h)", power(name, 2 * t, w + h)?)
        }
        "N_cagefree" => {
            let (t, n, l) = (get(params.tiles, "tiles")?, get(params.n, "n")?, get(params.v_l1, "v_l1")?);
            let inner = factorial(name, &power(name, t, l * l)?)? + 1u32;
            ("n + ‖v‖₁((|T|^(‖v‖₁²))! + 1)", big(n) + big(l) * inner)
        }
        _ => return Err(MovieError::UnknownBound(name.into())),
    };
    Ok(BoundReport { name: name.into(), formula: formula.into(), value })
}

/// Every named bound for the given parameters; `n` and `h` default to `2|T| + 2`.
pub fn all_bounds(params: &BoundParams) -> Vec<(&'static str, Result<BoundReport, MovieError>)> {
    let default = params.tiles.map(|t| 2 * t + 2);
    let filled = BoundParams { n: params.n.or(default), h: params.h.or(default), ..*params };
    BOUND_NAMES.iter().map(|&name| (name, bound(name, &filled))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(tiles: u64, seed: u64) -> BoundParams {
        BoundParams { tiles: Some(tiles), seed: Some(seed), ..Default::default() }
    }

    fn value(name: &str, params: BoundParams) -> BigUint {
        bound(name, &params).unwrap().value
    }

    #[test]
    fn spot_values() {
        assert_eq!(value("f_b", BoundParams { n: Some(1), ..p(1, 1) }), BigUint::from(3u32));
        assert_eq!(value("B_seed", p(2, 1)), BigUint::from(5u32));
        assert_eq!(value("B_s", BoundParams { w: Some(3), h: Some(2), ..p(1, 1) }), BigUint::from(32u32));
        assert_eq!(value("B_d_init", p(3, 1)), BigUint::from(8u32));
        assert_eq!(value("B_d", p(2, 1)), BigUint::from(1u32 + 12 * 2 + 1));
        assert_eq!(value("f_b", BoundParams { n: Some(2), ..p(1, 1) }), BigUint::from(24u32 + 1));
        assert_eq!(value("N_cagefree", BoundParams { n: Some(3), v_l1: Some(2), ..p(2, 1) }).to_string(), "41845579776005");
    }

    #[test]
    fn errors() {
        assert_eq!(bound("nope", &p(1, 1)), Err(MovieError::UnknownBound("nope".into())));
        assert!(matches!(bound("B_s", &p(1, 1)), Err(MovieError::MissingParameter { param: "w", .. })));
        assert!(matches!(bound("f_b", &BoundParams { n: Some(12), ..p(5, 1) }), Err(MovieError::TooLarge { .. })));
    }

    #[test]
    fn all_bounds_fill_defaults() {
        let all = all_bounds(&p(1, 1));
        assert_eq!(all.len(), BOUND_NAMES.len());
        let f_b = all.iter().find(|(n, _)| *n == "f_b").unwrap().1.as_ref().unwrap();
        // (2^4)! + 1
        assert_eq!(f_b.value.to_string(), "20922789888001");
        assert!(all.iter().any(|(n, r)| *n == "N_cagefree" && r.is_err()));
    }

    proptest! {
        #[test]
        fn small_values_match_u128(t in 1u64..4, n in 1u64..3, s in 1u64..5) {
            let m = (t + 1).pow(n as u32);
            let fact: u128 = (1..=m as u128).product();
            prop_assert_eq!(value("f_b", BoundParams { n: Some(n), ..p(t, s) }), BigUint::from(fact + 1));
            prop_assert_eq!(value("B_d", p(t, s)), BigUint::from(s + (3 * t + s + 5) * t + 1));
        }
    }
}
