use crate::error::{Error, Result};

/// `χ(s) = (s + 1) log(s + 1) − s`.
pub fn entropy_weight(s: f64) -> Result<f64> {
    if s.is_nan() || s < 0.0 {
        return Err(Error::NegativeArgument(s));
    }
    Ok((s + 1.0) * s.ln_1p() - s)
}

/// Convex conjugate of [`entropy_weight`]: `χ*(t) = e^t − t − 1`.
pub fn conj_pair(t: f64) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::NegativeArgument(t));
    }
    Ok(t.exp_m1() - t)
}

/// Young's inequality `st ≤ χ(s) + χ*(t)`, with a relative rounding slack.
pub fn conj_inequality_check(s: f64, t: f64) -> Result<bool> {
    let rhs = entropy_weight(s)? + conj_pair(t)?;
    Ok(s * t <= rhs + 1e-12 * (1.0 + rhs.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_forms() {
        assert_eq!(conj_pair(0.0).unwrap(), 0.0);
        assert!(conj_pair(3.0).unwrap() > 0.0);
        assert!(conj_inequality_check(0.0, 7.0).unwrap());
        assert!(conj_pair(-1.0).is_err());
        assert!(entropy_weight(-1.0).is_err());
        // equality at t = log(1 + s)
        let s: f64 = 2.5;
        let t = s.ln_1p();
        let gap = entropy_weight(s).unwrap() + conj_pair(t).unwrap() - s * t;
        assert!(gap.abs() < 1e-12);
    }

    #[test]
    fn young_inequality_fuzz() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10_000 {
            let s = rng.gen_range(0.0..50.0);
            let t = rng.gen_range(0.0..50.0);
            assert!(conj_inequality_check(s, t).unwrap(), "s={s} t={t}");
        }
    }
}
