#![allow(dead_code)]

use circle_distortion::numbers::{QuadIrr, Rational};
use circle_distortion::pamap::{CirclePoint, PAHomeo};
use circle_distortion::words::{Assignment, GenId, Letter, Word};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn alpha() -> QuadIrr {
    QuadIrr::sqrt2_minus_1()
}

fn sorted_distinct_fractions<R: Rng>(rng: &mut R, k: usize, den: i64) -> Vec<i64> {
    let mut pool: Vec<i64> = (0..den).collect();
    pool.shuffle(rng);
    let mut v = pool[..k].to_vec();
    v.sort_unstable();
    v
}

/// A random map: a rational interpolant, conjugated by and composed with
/// rotations by integer multiples of alpha so breakpoints and values leave Q.
pub fn random_map<R: Rng>(rng: &mut R, field: &QuadIrr) -> PAHomeo {
    let k = rng.gen_range(1..=5);
    let den = 48;
    let xs = sorted_distinct_fractions(rng, k, den);
    let ys = sorted_distinct_fractions(rng, k, den);
    let shift = rng.gen_range(0..den);
    let samples: Vec<_> = xs
        .iter()
        .zip(&ys)
        .map(|(&x, &y)| (CirclePoint::new(field.ratio(x, den)), field.ratio(y + shift, den)))
        .collect();
    let base = PAHomeo::from_breakpoints(&samples).expect("monotone samples");
    let pre = PAHomeo::rotation(&field.alpha().scale(&Rational::from_integer(rng.gen_range(-3i64..=3).into())));
    let post = PAHomeo::rotation(&field.alpha().scale(&Rational::from_integer(rng.gen_range(-3i64..=3).into())));
    post.compose(&base).compose(&pre)
}

/// A random point, rational or involving alpha.
pub fn random_point<R: Rng>(rng: &mut R, field: &QuadIrr) -> CirclePoint {
    let a = field.ratio(rng.gen_range(0..997), 997);
    let b = field.alpha().scale(&Rational::from_integer(rng.gen_range(-4i64..=4).into()));
    CirclePoint::new(&a + &b)
}

pub const GENS: [&str; 4] = ["a", "b", "c", "d"];

pub fn random_assignment<R: Rng>(rng: &mut R, field: &QuadIrr) -> Assignment {
    let mut env = Assignment::new(field);
    for g in GENS {
        env.insert(g, random_map(rng, field));
    }
    env
}

pub fn random_word<R: Rng>(rng: &mut R, max_len: usize) -> Word {
    let len = rng.gen_range(0..=max_len);
    Word::from_letters(
        (0..len)
            .map(|_| {
                let g = GenId::new(GENS[rng.gen_range(0..GENS.len())]);
                if rng.gen_bool(0.5) {
                    Letter::pos(g)
                } else {
                    Letter::neg(g)
                }
            })
            .collect(),
    )
}

/// Straight left-to-right product, one letter at a time.
pub fn naive_evaluate(w: &Word, env: &Assignment) -> PAHomeo {
    let mut acc = PAHomeo::identity(env.field());
    for l in w.letters() {
        let m = env.get(l.gen()).expect("assigned");
        let m = if l.exp() < 0 { m.inverse() } else { m.clone() };
        acc = acc.compose(&m);
    }
    acc
}
