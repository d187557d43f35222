//! Seeded random and exhaustive term generators for the test suites.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::term::SkTerm;

pub use rand::SeedableRng;

/// Generator type used by every suite.
pub type TermRng = ChaCha8Rng;

/// Default seed of the randomized suites.
pub const DEFAULT_SEED: u64 = 0x5EED_2024;

pub fn rng(seed: u64) -> TermRng {
    TermRng::seed_from_u64(seed)
}

/// Binder names are drawn from a small pool, so shadowing is common and
/// loading has to rename.
const BINDERS: [&str; 6] = ["x", "y", "z", "f", "g", "h"];

/// A random pure term of exactly `size` constructors whose free variables
/// come from `scope`. Sizes that cannot be filled (a variable with an
/// empty scope) are avoided by the callers.
fn pure_of_size(rng: &mut TermRng, size: usize, scope: &mut Vec<String>, app_bias: f64) -> SkTerm {
    let can_var = !scope.is_empty();
    if size == 1 {
        let x = &scope[rng.gen_range(0..scope.len())];
        return SkTerm::var(x);
    }
    // An application needs both sides fillable.
    let min_side = if can_var { 1 } else { 2 };
    let app_ok = size > 2 * min_side;
    if app_ok && rng.gen_bool(app_bias) {
        let left = rng.gen_range(min_side..=size - 1 - min_side);
        let h = pure_of_size(rng, left, scope, app_bias);
        let a = pure_of_size(rng, size - 1 - left, scope, app_bias);
        return SkTerm::app(h, a);
    }
    let x = BINDERS[rng.gen_range(0..BINDERS.len())].to_string();
    scope.push(x.clone());
    let body = pure_of_size(rng, size - 1, scope, app_bias);
    scope.pop();
    SkTerm::abs(&x, body)
}

/// A random closed pure term with `2 ≤ size ≤ max_size`, biased towards
/// applications so that evaluation has work to do.
pub fn closed_term(rng: &mut TermRng, max_size: usize) -> SkTerm {
    let size = rng.gen_range(2..=max_size.max(2));
    pure_of_size(rng, size, &mut Vec::new(), 0.6)
}

/// A random value `λx.t` of size at most `max_size`, with free variables
/// among `free`.
pub fn value(rng: &mut TermRng, max_size: usize, free: &[&str]) -> SkTerm {
    let size = rng.gen_range(2..=max_size.max(2));
    let mut scope: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    let x = BINDERS[rng.gen_range(0..BINDERS.len())];
    scope.push(x.to_string());
    SkTerm::abs(x, pure_of_size(rng, size - 1, &mut scope, 0.5))
}

/// A random well-named term with explicit and skeletal substitutions, of
/// size at most `max_size`, with free variables among `free`.
///
/// Substitutions appear only where evaluation from a pure term can put
/// them: abstraction bodies and application arguments stay pure.
pub fn sk_term(rng: &mut TermRng, max_size: usize, free: &[&str]) -> SkTerm {
    let size = rng.gen_range(1..=max_size.max(1));
    let mut scope: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    let mut counter = 0;
    sk_rec(rng, size, &mut scope, &mut counter, false)
}

fn fresh(counter: &mut usize) -> String {
    *counter += 1;
    format!("v{counter}")
}

fn sk_rec(rng: &mut TermRng, size: usize, scope: &mut Vec<String>, counter: &mut usize, pure: bool) -> SkTerm {
    if size <= 1 || (size == 2 && rng.gen_bool(0.3)) {
        let x = &scope[rng.gen_range(0..scope.len())];
        return SkTerm::var(x);
    }
    let abs = |rng: &mut TermRng, size: usize, scope: &mut Vec<String>, counter: &mut usize| {
        let x = fresh(counter);
        scope.push(x.clone());
        let b = sk_rec(rng, size - 1, scope, counter, true);
        scope.pop();
        SkTerm::abs(&x, b)
    };
    match rng.gen_range(0..10) {
        2..=4 if size >= 3 => {
            let left = rng.gen_range(1..=size - 2);
            let h = sk_rec(rng, left, scope, counter, pure);
            let a = sk_rec(rng, size - 1 - left, scope, counter, true);
            SkTerm::app(h, a)
        }
        5..=9 if size >= 4 && !pure => {
            let x = fresh(counter);
            let arg_size = rng.gen_range(1..=size - 2);
            let skeletal = rng.gen_bool(0.3);
            let arg = if skeletal || rng.gen_bool(0.3) {
                // Skeletal substitutions hold pure values.
                abs(rng, arg_size.max(2), scope, counter)
            } else {
                sk_rec(rng, arg_size, scope, counter, false)
            };
            scope.push(x.clone());
            let body = sk_rec(rng, size - 1 - arg_size, scope, counter, false);
            scope.pop();
            if skeletal {
                SkTerm::skes(body, &x, arg)
            } else {
                SkTerm::es(body, &x, arg)
            }
        }
        _ => abs(rng, size, scope, counter),
    }
}

/// Every pure term of exactly `size` constructors over the variables in
/// scope, binders named by depth.
fn all_of_size(size: usize, scope: &mut Vec<String>, out: &mut Vec<SkTerm>) {
    if size == 1 {
        out.extend(scope.iter().map(|x| SkTerm::var(x)));
        return;
    }
    let x = format!("b{}", scope.len());
    scope.push(x.clone());
    let mut bodies = Vec::new();
    all_of_size(size - 1, scope, &mut bodies);
    scope.pop();
    out.extend(bodies.into_iter().map(|b| SkTerm::abs(&x, b)));
    for left in 1..size - 1 {
        let mut heads = Vec::new();
        all_of_size(left, scope, &mut heads);
        let mut args = Vec::new();
        all_of_size(size - 1 - left, scope, &mut args);
        for h in &heads {
            for a in &args {
                out.push(SkTerm::app(h.clone(), a.clone()));
            }
        }
    }
}

/// Every value of size at most `max_size` whose free variables are among
/// `free`, up to α-equivalence.
pub fn all_values(max_size: usize, free: &[&str]) -> Vec<SkTerm> {
    let mut scope: Vec<String> = free.iter().map(|s| s.to_string()).collect();
    let x = format!("b{}", scope.len());
    scope.push(x.clone());
    let mut out = Vec::new();
    for size in 1..max_size {
        let mut bodies = Vec::new();
        all_of_size(size, &mut scope, &mut bodies);
        out.extend(bodies.into_iter().map(|b| SkTerm::abs(&x, b)));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_terms_are_closed_and_bounded() {
        let mut r = rng(7);
        for _ in 0..500 {
            let t = closed_term(&mut r, 15);
            assert!(t.free_vars().is_empty(), "{t}");
            assert!((2..=15).contains(&t.size()));
        }
    }

    #[test]
    fn values_are_values() {
        let mut r = rng(8);
        for _ in 0..500 {
            let v = value(&mut r, 40, &["z", "w"]);
            assert!(v.is_value() && v.size() <= 40);
            assert!(v.free_vars().iter().all(|x| &**x == "z" || &**x == "w"));
        }
    }

    #[test]
    fn sk_terms_are_well_named() {
        let mut r = rng(9);
        for _ in 0..500 {
            let t = sk_term(&mut r, 12, &["a", "b"]);
            assert!(t.is_well_named(), "{t}");
        }
    }

    #[test]
    fn exhaustive_small_values() {
        // λx.x, λx.z
        assert_eq!(all_values(2, &["z"]).len(), 2);
        // plus λx.λy.{x,y,z}
        assert_eq!(all_values(3, &["z"]).len(), 5);
        // plus λx.λy.λw.{x,y,w,z} and λx.{x,z} {x,z}
        assert_eq!(all_values(4, &["z"]).len(), 5 + 4 + 4);
    }
}
