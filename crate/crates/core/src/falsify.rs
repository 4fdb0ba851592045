//! Randomized search for instances refuting a containment claim. A refutation is a
//! certificate; failing to find one proves nothing.

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::error::Result;
use crate::eval::{evaluate, freeze, Tuple};
use crate::instance::{Constant, Instance};
use crate::query::{require_same_arity, ConjunctiveQuery};
use crate::schema::Schema;

/// An instance on which `q1` returns `tuple` but `q2` does not.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub instance: Instance,
    pub tuple: Tuple,
}

/// Each possible fact over constants `a0 … a{n-1}` is included independently with
/// probability `density`.
pub fn random_instance<R: Rng + ?Sized>(
    schema: &Schema,
    constants: usize,
    density: f64,
    rng: &mut R,
) -> Instance {
    let pool: Vec<Constant> = (0..constants)
        .map(|i| Constant::new(format!("a{i}")).expect("valid name"))
        .collect();
    let mut instance = Instance::new();
    for (name, arity) in schema.relations() {
        let total = constants.pow(arity as u32);
        for mut code in 0..total {
            if !rng.random_bool(density) {
                continue;
            }
            let mut args = Vec::with_capacity(arity);
            for _ in 0..arity {
                args.push(pool[code % constants].clone());
                code /= constants;
            }
            instance
                .insert(name, args)
                .expect("schema arities are consistent");
        }
    }
    instance
}

fn refutes(
    q1: &ConjunctiveQuery,
    q2: &ConjunctiveQuery,
    instance: &Instance,
) -> Result<Option<Tuple>> {
    let a1 = evaluate(q1, instance)?;
    if a1.is_empty() {
        return Ok(None);
    }
    let a2 = evaluate(q2, instance)?;
    Ok(a1.into_iter().find(|t| !a2.contains(t)))
}

/// Looks for evidence that `q1 ⋢ q2`: first on the frozen body of `q1`, then on
/// `trials` random instances drawn from a seeded generator.
pub fn find_counterexample(
    q1: &ConjunctiveQuery,
    q2: &ConjunctiveQuery,
    schema: &Schema,
    trials: usize,
    seed: u64,
) -> Result<Option<Counterexample>> {
    require_same_arity(q1, q2)?;
    let frozen = freeze(q1).instance;
    if let Some(tuple) = refutes(q1, q2, &frozen)? {
        return Ok(Some(Counterexample {
            instance: frozen,
            tuple,
        }));
    }
    let mut rng = StdRng::seed_from_u64(seed);
    for _ in 0..trials {
        let constants = rng.random_range(1..=4);
        let density = rng.random_range(0.15..0.7);
        let instance = random_instance(schema, constants, density, &mut rng);
        if let Some(tuple) = refutes(q1, q2, &instance)? {
            return Ok(Some(Counterexample { instance, tuple }));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_query, parse_schema};

    #[test]
    fn finds_refutation_for_non_containment() {
        let s = parse_schema("R/2 L/1").unwrap();
        let q1 = parse_query("(x, y) <- R(x, z), L(y), L(z)").unwrap();
        let q2 = parse_query("(x, y) <- R(x, y), R(y, x), L(x), L(y)").unwrap();
        let cex = find_counterexample(&q1, &q2, &s, 50, 7)
            .unwrap()
            .expect("refutable");
        assert!(evaluate(&q1, &cex.instance).unwrap().contains(&cex.tuple));
        assert!(!evaluate(&q2, &cex.instance).unwrap().contains(&cex.tuple));
    }

    #[test]
    fn none_for_true_containment() {
        let s = parse_schema("R/2 L/1").unwrap();
        let q1 = parse_query("(x, y) <- R(x, y), R(y, x), L(x), L(y)").unwrap();
        let q2 = parse_query("(x, y) <- R(x, z), L(y), L(z)").unwrap();
        assert_eq!(find_counterexample(&q1, &q2, &s, 200, 1).unwrap(), None);
    }

    #[test]
    fn random_instances_are_reproducible() {
        let s = parse_schema("R/2 L/1").unwrap();
        let a = random_instance(&s, 3, 0.4, &mut StdRng::seed_from_u64(3));
        let b = random_instance(&s, 3, 0.4, &mut StdRng::seed_from_u64(3));
        assert_eq!(a, b);
        assert!(a.check_schema(&s).is_ok());
    }
}
