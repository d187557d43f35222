//! The skeletal machine on the input that encodes the third family member
//! through two administrative redexes.

use skelmad_core::machine::{Label, Machine, Run, RunOptions, RunOutcome, Variant};
use skelmad_core::term::{parse, parse::parse_syntax};

const INPUT: &str = r"(\i. (\g. (\z. (z i) (z i)) (g (g (g i)))) (\x.\y. (x i) (x i) y)) (\w. w)";

fn golden(opts: &RunOptions) -> (Machine, Run) {
    let (store, root) = parse(INPUT).unwrap();
    let mut m = Machine::new(Variant::Smad, store, root).unwrap();
    let run = m.run(opts).unwrap();
    (m, run)
}

fn traced() -> (Machine, Run) {
    golden(&RunOptions { trace: true, labels: true, audit: true, ..Default::default() })
}

#[test]
fn twenty_four_betas_to_the_identity() {
    let (m, run) = golden(&RunOptions::default());
    assert_eq!(run.outcome, RunOutcome::Final);
    assert_eq!(run.stats.beta, 24);
    assert!(m.code_term().alpha_eq(&parse_syntax(r"\w. w").unwrap()));
    assert!(m.is_final());
}

#[test]
fn opening_transitions() {
    use Label::*;
    let (_, run) = traced();
    let expected = [
        Sea1, Beta, Sea1, Beta, Sea1, Beta, Sea1, Sea1, Sea2, Sea1, Sk, Ss, Beta, Sea3, Sk, Ss, Beta, Sea1, Sea2, Sea1,
        Sea1, Sea2, Sea1, Ss, Beta,
    ];
    assert_eq!(&run.labels[..expected.len()], &expected);
}

#[test]
fn first_state_shows_the_input() {
    let (_, run) = traced();
    assert_eq!(run.trace[0].trim(), "| (λi.(λg.(λz.z i (z i)) (g (g (g i)))) (λx.λy.x i (x i) y)) (λw.w) |  |");
}

#[test]
fn skeletonizing_z_shares_its_flesh() {
    let (_, run) = traced();
    let line = &run.trace[15];
    assert!(line.starts_with("→sk"), "{line}");
    assert!(
        line.ends_with(
            r"| z | i:z i | [z\\λy_2.p_3 y_2]:[p_3\x_1 i (x_1 i)]:[x_1\g (g i)]:[g\\λx.λy.x i (x i) y]:[i\λw.w]"
        ),
        "{line}"
    );
    let copy = &run.trace[16];
    assert!(copy.contains(r"| λy_4.p_3 y_4 |"), "{copy}");
}

#[test]
fn fresh_names_follow_one_counter() {
    let (_, run) = traced();
    assert!(run.trace[12].contains("| λx_1.λy_2.x_1 i (x_1 i) y_2 |"));
    assert!(run.trace[24].contains("| λx_5.λy_6.x_5 i (x_5 i) y_6 |"));
}

#[test]
fn skeleton_of_g_is_the_whole_value() {
    let (_, run) = traced();
    assert!(run.trace[11].starts_with("→sk"));
    assert!(run.trace[11].contains(r"[g\\λx.λy.x i (x i) y]:[i\λw.w]"));
}

#[test]
fn counts_respect_the_transition_bounds() {
    let (_, run) = traced();
    run.stats.check_entry_bounds().unwrap();
    // Flesh entries are evaluated too, so `sea2` exceeds β here.
    assert_eq!((run.stats.beta, run.stats.sea2), (24, 25));
    assert!(run.stats.check_beta_bounds().is_err());
    assert_eq!(
        run.stats.sk + run.stats.ss + run.stats.beta,
        run.labels.iter().filter(|l| l.principal().is_some()).count() as u64
    );
}
