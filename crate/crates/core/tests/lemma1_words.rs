use circle_distortion::constructions::{gens, make_f1};
use circle_distortion::lemma1::{Lemma1Ctx, Lemma1Names};
use circle_distortion::numbers::{QuadIrr, Rational};
use circle_distortion::pamap::PAHomeo;
use circle_distortion::par::Exec;
use circle_distortion::words::Letter;

fn ctx() -> Lemma1Ctx {
    let alpha = QuadIrr::sqrt2_minus_1();
    Lemma1Ctx::new(alpha.alpha(), Rational::new(9.into(), 10.into()), 21, Lemma1Names::default()).unwrap()
}

#[test]
fn sweep_to_512() {
    let c = ctx();
    let seq = c.sweep(512, Exec::Sequential).unwrap();
    assert!(seq.iter().all(|r| r.ok()), "{:?}", seq.iter().find(|r| !r.ok()));
    assert_eq!(seq, c.sweep(512, Exec::Parallel).unwrap());
}

#[test]
fn mirrored_words_track_negative_powers() {
    let c = ctx();
    let alpha = QuadIrr::sqrt2_minus_1();
    let m = c.mirrored();
    for n in [1u64, 2, 7, 100, 333] {
        let w = m.h_word(n).unwrap();
        assert!(!w
            .letters()
            .iter()
            .any(|l| l.gen().name() != "t_gamma" && l.gen().name() != "h" && l.gen().name() != "r"));
        let back = PAHomeo::rotation(&alpha.alpha().scale(&Rational::from_integer((-(n as i64)).into())));
        assert!(w.evaluate(c.assignment()).unwrap().agrees_on(
            &back,
            &circle_distortion::CirclePoint::new(alpha.zero()),
            &circle_distortion::CirclePoint::new(alpha.ratio(9, 10)),
        ));
    }
}

#[test]
fn conjugates_of_f1() {
    let c = ctx();
    let alpha = QuadIrr::sqrt2_minus_1();
    let f1 = make_f1(&alpha);
    let env = c.assignment().clone().with(gens::F1, f1.clone());
    let g = Letter::pos(gens::F1);
    for n in (-40i64..=40).chain([985, -985]) {
        let w = c.conj_word(n, &g, &env).unwrap();
        let shift = alpha.alpha().scale(&Rational::from_integer(n.into()));
        let expect = PAHomeo::rotation(&shift).compose(&f1).compose(&PAHomeo::rotation(&-&shift));
        assert_eq!(w.evaluate(&env).unwrap(), expect, "n = {n}");
        assert!(w.len() as u64 <= c.conj_length_bound(n));
    }
}
