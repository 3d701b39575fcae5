use std::collections::BTreeSet;

mod common;

use proptest::prelude::*;

use common::{all_paths, sites, sorted, sub, term_paths};

use ndcut::generator::{gen_correct_marked, gen_subst_instance};
use ndcut::head::{classify_in, decompose, fill};
use ndcut::marked::{
    acceptable, car_star_holds, correct_in, eps_of, is_btr, lg, lift_step, reduction_distance,
    st_ids, t1, t2_in,
};
use ndcut::oracle::explore_in;
use ndcut::reduction::{redex_kind, redexes, reduce_at_in, step_all_in, Redex};
use ndcut::syntax::{parse, parse_term_in};
use ndcut::term::{alpha_eq, Node, Subtree};
use ndcut::{
    check, gen_typed, subst_class, subst_intu, BoxMode, Elim, GenConfig, Path, RedexKind, Side,
    SourceUnit, SubstClass, SubstIntu, Term, TypingContext,
};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig {
        cases: n,
        ..ProptestConfig::default()
    }
}

fn typed(seed: u64, size: usize) -> Option<(TypingContext, Term)> {
    gen_typed(&GenConfig::new(seed, size)).ok()
}

/// The row a simple term must land in, computed from its spine alone.
fn expected_row(t: &Term) -> Option<u8> {
    let (h, es) = t.unspine();
    let n = es.len();
    if (0..n.saturating_sub(1)).any(|j| es[j].is_case()) {
        return Some(5);
    }
    if n == 0 {
        return matches!(h, Term::Var(_) | Term::Name(..)).then_some(0);
    }
    match (h, es[0]) {
        (Term::Var(_), _) => Some(0),
        (Term::Lam(..), Elim::Term(_)) => Some(1),
        (Term::Pair(..), Elim::Proj(_)) => Some(2),
        (Term::Inj(..), Elim::Case(..)) => Some(3),
        (Term::Mu(..), _) => Some(4),
        _ => None,
    }
}

const TOKENS: &[&str] = &[
    "\\", "x", "y", "a", ":", ".", "(", ")", "<", ">", ",", "[", "]", "|", "mu", "p1", "p2", "in1",
    "in2", "A", "B", "->", "/\\", "\\/", "Bot", "{", "}", "[[", "]]", "ctx", ";", "=", " ",
];

proptest! {
    #![proptest_config(cases(256))]

    #[test]
    fn empty_substitution_is_identity(seed in 1u64..100_000, size in 3usize..30) {
        if let Some((_, t)) = typed(seed, size) {
            prop_assert!(alpha_eq(&subst_intu(&t, &SubstIntu::new()), &t));
        }
    }

    #[test]
    fn substitution_distributes(s1 in 1u64..100_000, s2 in 1u64..100_000, side in any::<bool>()) {
        let (Some((c1, m)), Some((_, n))) = (typed(s1, 15), typed(s2, 15)) else { return Ok(()) };
        let Some((x, _)) = c1.intu_vars().next() else { return Ok(()) };
        let s = SubstIntu::single(x.clone(), n.clone());
        let pair = Term::pair(m.clone(), n.clone());
        let lhs = subst_intu(&pair, &s);
        let rhs = Term::pair(subst_intu(&m, &s), subst_intu(&n, &s));
        prop_assert!(alpha_eq(&lhs, &rhs));
        let app = Term::apply(m.clone(), n.clone());
        prop_assert!(alpha_eq(&subst_intu(&app, &s), &Term::apply(subst_intu(&m, &s), subst_intu(&n, &s))));

        let e = Elim::Proj(if side { Side::Left } else { Side::Right });
        let sc = SubstClass::new("q", e);
        let named = Term::pair(Term::name("q", m.clone()), Term::name("q", n.clone()));
        let lhs = subst_class(&named, &sc);
        let rhs = Term::pair(subst_class(&Term::name("q", m), &sc), subst_class(&Term::name("q", n), &sc));
        prop_assert!(alpha_eq(&lhs, &rhs));
    }

    #[test]
    fn replace_at_round_trip(seed in 1u64..100_000, size in 3usize..30) {
        let Some((_, t)) = typed(seed, size) else { return Ok(()) };
        for p in all_paths(&t) {
            let here = t.subterm_at(&p).unwrap().to_owned();
            prop_assert_eq!(t.replace_at(&p, here).unwrap(), t.clone());
        }
    }

    #[test]
    fn substitution_size_formula(seed in 1u64..100_000, size in 5usize..30) {
        let Ok((_, m, s)) = gen_subst_instance(&GenConfig::new(seed, size)) else { return Ok(()) };
        let mut want = m.cxty() as isize;
        for (x, n) in s.iter() {
            want += m.occurrences(x) as isize * (n.cxty() as isize - 1);
        }
        prop_assert_eq!(subst_intu(&m, &s).cxty() as isize, want);
    }

    #[test]
    fn print_parse_round_trip(seed in 1u64..100_000, size in 1usize..40) {
        let Some((ctx, t)) = typed(seed, size) else { return Ok(()) };
        let back = parse_term_in(&ctx, &t.to_string()).unwrap();
        prop_assert!(alpha_eq(&back, &t), "{} vs {}", back, t);
        let ty = check(&ctx, &t).unwrap();
        let unit = SourceUnit { ctx: ctx.clone(), term: t.clone(), expected: Some(ty.clone()) };
        let again = parse(&unit.to_string()).unwrap();
        prop_assert!(alpha_eq(&again.term, &t));
        prop_assert_eq!(again.expected, Some(ty));
    }

    #[test]
    fn typing_is_unique_and_weakens(seed in 1u64..100_000, size in 1usize..35) {
        let Some((ctx, t)) = typed(seed, size) else { return Ok(()) };
        let ty = check(&ctx, &t).unwrap();
        prop_assert_eq!(check(&ctx, &t).unwrap(), ty.clone());
        let wider = ctx.clone()
            .with_intu("zfresh", ndcut::Formula::atom("Z"))
            .with_class("zk", ndcut::Formula::atom("Z"));
        prop_assert_eq!(check(&wider, &t).unwrap(), ty);
    }

    #[test]
    fn substitution_commutes_with_a_step(seed in 1u64..100_000, size in 5usize..25) {
        let Ok((ctx, m, s)) = gen_subst_instance(&GenConfig::new(seed, size)) else { return Ok(()) };
        let ms = subst_intu(&m, &s);
        for r in redexes(&m) {
            let red = reduce_at_in(&ctx, &m, &r.path).unwrap();
            let red_s = reduce_at_in(&ctx, &ms, &r.path).unwrap();
            prop_assert!(alpha_eq(&red_s, &subst_intu(&red, &s)), "{} at {}", m, r);
        }
    }

    #[test]
    fn step_in_substituted_term_is_replayed(seed in 1u64..100_000, size in 5usize..25) {
        let Ok((ctx, m, s)) = gen_subst_instance(&GenConfig::new(seed, size)) else { return Ok(()) };
        for (x, n) in s.iter() {
            let occ = term_paths(&m, |t| matches!(t, Term::Var(v) if v == x));
            let ms = subst_intu(&m, &s);
            for r in redexes(n) {
                let n2 = reduce_at_in(&ctx, n, &r.path).unwrap();
                let mut s2 = s.clone();
                s2.insert(x.clone(), n2);
                let want = subst_intu(&m, &s2);
                let mut cur = ms.clone();
                for o in &occ {
                    cur = reduce_at_in(&ctx, &cur, &o.join(&r.path)).unwrap();
                }
                prop_assert!(alpha_eq(&cur, &want), "{} {} steps", m, occ.len());
            }
        }
    }

    #[test]
    fn reduction_is_deterministic_and_typed(seed in 1u64..100_000, size in 3usize..35) {
        let Some((ctx, t)) = typed(seed, size) else { return Ok(()) };
        let ty = check(&ctx, &t).unwrap();
        for r in redexes(&t) {
            prop_assert_eq!(redex_kind(&sub(&t, &r.path)), Some(r.kind));
            let a = reduce_at_in(&ctx, &t, &r.path).unwrap();
            let b = reduce_at_in(&ctx, &t, &r.path).unwrap();
            prop_assert_eq!(&a, &b);
        }
        // one entry per alpha class of reducts, from the first redex reaching it
        let steps = step_all_in(&ctx, &t);
        let mut firsts: Vec<(Redex, Term)> = Vec::new();
        for r in redexes(&t) {
            let u = reduce_at_in(&ctx, &t, &r.path).unwrap();
            if !firsts.iter().any(|(_, v)| alpha_eq(v, &u)) {
                firsts.push((r, u));
            }
        }
        prop_assert_eq!(&steps, &firsts);
        for (r, u) in steps {
            prop_assert_eq!(check(&ctx, &u).ok(), Some(ty.clone()), "{} at {}", t, r);
        }
    }

    #[test]
    fn decompose_then_fill(seed in 1u64..100_000, size in 1usize..40) {
        let Some((_, t)) = typed(seed, size) else { return Ok(()) };
        let (c, ms) = decompose(&t);
        prop_assert_eq!(c.holes(), ms.len());
        prop_assert_eq!(fill(&c, &ms).unwrap(), t);
    }

    #[test]
    fn head_rows_are_exclusive(seed in 1u64..100_000, size in 3usize..35) {
        let Some((ctx, t)) = typed(seed, size) else { return Ok(()) };
        for p in term_paths(&t, |s| matches!(s, Term::Var(_) | Term::App(..) | Term::Name(..))) {
            let s = sub(&t, &p);
            // binders above p are unknown to ctx; classification needs none of them
            let Ok(row) = classify_in(&ctx, &s) else {
                prop_assert_eq!(expected_row(&s), None);
                continue;
            };
            prop_assert_eq!(Some(row.case), expected_row(&s), "{}", s);
            prop_assert_eq!(row.head_reduct.is_some(), row.case != 0);
        }
    }

    #[test]
    fn head_reduct_is_a_step(seed in 1u64..100_000, size in 3usize..35) {
        let Some((ctx, t)) = typed(seed, size) else { return Ok(()) };
        for p in ndcut::head::component_paths(&t) {
            let s = sub(&t, &p);
            let Ok(row) = classify_in(&ctx, &s) else { continue };
            let Some(h) = row.head_reduct else { continue };
            let steps = step_all_in(&ctx, &s);
            prop_assert!(steps.iter().any(|(_, u)| alpha_eq(u, &h)), "{}", s);
        }
    }

    #[test]
    fn head_analysis_commutes_with_substitution(seed in 1u64..100_000, size in 5usize..25) {
        let Ok((ctx, m, s)) = gen_subst_instance(&GenConfig::new(seed, size)) else { return Ok(()) };
        let (_, comps) = decompose(&m);
        for c in comps {
            let Ok(row) = classify_in(&ctx, &c) else { continue };
            let Some(h) = &row.head_reduct else { continue };
            let cs = subst_intu(&c, &s);
            let row_s = classify_in(&ctx, &cs).unwrap();
            prop_assert_eq!(row_s.case, row.case);
            prop_assert!(alpha_eq(row_s.head_reduct.as_ref().unwrap(), &subst_intu(h, &s)), "{}", c);
            prop_assert_eq!(row_s.args.len(), row.args.len());
            for (a, b) in row.args.iter().zip(&row_s.args) {
                let same = match (&a.value, &b.value) {
                    (Subtree::Term(x), Subtree::Term(y)) => alpha_eq(&subst_intu(x, &s), y),
                    (Subtree::Elim(x), Subtree::Elim(y)) => {
                        ndcut::term::alpha_eq_elim(&ndcut::subst::subst_intu_elim(x, &s), y)
                    }
                    _ => false,
                };
                prop_assert!(same, "{}", c);
            }
        }
    }

    #[test]
    fn parser_never_panics(toks in prop::collection::vec(prop::sample::select(TOKENS), 0..40)) {
        let src = toks.concat();
        let _ = parse(&src);
        let _ = ndcut::parse_term(&src);
        let _ = ndcut::parse_formula(&src);
        let _ = ndcut::parse_scenario(&src);
    }

    #[test]
    fn parser_never_panics_on_bytes(src in "\\PC{0,60}") {
        let _ = parse(&src);
        let _ = ndcut::parse_scenario(&src);
    }
}

proptest! {
    #![proptest_config(cases(128))]

    #[test]
    fn eta_strictly_decreases_along_edges(seed in 1u64..100_000, size in 3usize..20) {
        let Some((ctx, t)) = typed(seed, size) else { return Ok(()) };
        let g = explore_in(Some(&ctx), &t, 1000);
        if !g.is_complete() {
            return Ok(());
        }
        let eta = g.etas().unwrap();
        prop_assert_eq!(&eta, &g.etas_naive().unwrap());
        for e in g.edges() {
            prop_assert!(eta[e.from] > eta[e.to]);
        }
        for nf in g.normal_form_ids() {
            prop_assert_eq!(eta[nf], 0);
        }
        prop_assert_eq!(g.violation_count(), 0);
    }

    #[test]
    fn generator_is_deterministic_and_typed(seed in any::<u64>(), size in 1usize..40) {
        let a = typed(seed, size);
        prop_assert_eq!(&a, &typed(seed, size));
        if let Some((ctx, t)) = a {
            prop_assert!(check(&ctx, &t).is_ok());
            prop_assert!(t.cxty() <= size);
        }
    }
}

const MODES: [BoxMode; 3] = [BoxMode::Term, BoxMode::Proj, BoxMode::Case];

fn marked(seed: u64, mode: usize) -> Option<(TypingContext, Term, BoxMode)> {
    let mode = MODES[mode];
    gen_correct_marked(&GenConfig::new(seed, 18), mode, 6)
        .ok()
        .map(|(c, t)| (c, t, mode))
}

fn in_markless_box(t: &Term, p: &Path) -> bool {
    let marks = term_paths(t, |s| matches!(s, Term::Mark(..)));
    sites(t).into_iter().any(|s| {
        let payload = s.child(1);
        let Some(Node::Elim(Elim::Boxed(e))) = t.subterm_at(&payload).ok() else {
            return false;
        };
        p.starts_with(&payload)
            && !marks.iter().any(|m| {
                eps_of(t, m)
                    .map(|o| ndcut::term::alpha_eq_elim(&o, e))
                    .unwrap_or(false)
            })
    })
}

proptest! {
    #![proptest_config(cases(96))]

    #[test]
    fn marked_steps_keep_correctness(seed in 1u64..100_000, mode in 0usize..3) {
        let Some((ctx, t, mode)) = marked(seed, mode) else { return Ok(()) };
        prop_assert!(correct_in(&t, Some(mode)), "{}", t);
        prop_assert!(car_star_holds(&t));
        let l = lg(&t).unwrap();
        let t2 = t2_in(&ctx, &t);
        for (r, u) in step_all_in(&ctx, &t) {
            prop_assert!(correct_in(&u, Some(mode)), "{} at {}", t, r);
            let u2 = t2_in(&ctx, &u);
            prop_assert!(reduction_distance(&ctx, &t2, &u2, 50_000).is_some(), "{} at {}", t, r);
            if is_btr(&t, &r) {
                prop_assert!(lg(&u).unwrap() < l, "{} at {}", t, r);
            }
            if alpha_eq(&t2, &u2) {
                // besides box moves, T2 cannot see an annihilation or a step
                // inside the payload of a box that owns no mark
                let invisible = is_btr(&t, &r)
                    || r.kind == RedexKind::Annihilate
                    || in_markless_box(&t, &r.path);
                prop_assert!(invisible, "{} at {}", t, r);
            }
        }
    }

    #[test]
    fn plain_steps_lift(seed in 1u64..100_000, mode in 0usize..3) {
        let Some((ctx, t, mode)) = marked(seed, mode) else { return Ok(()) };
        let plain = t1(&t);
        for (r, target) in step_all_in(&ctx, &plain) {
            let lift = lift_step(&ctx, &t, &target, Some(mode));
            prop_assert!(lift.is_ok(), "{} at {}", t, r);
            let lift = lift.unwrap();
            prop_assert!(alpha_eq(&t1(lift.result()), &target));
            prop_assert!(correct_in(lift.result(), Some(mode)));
        }
    }

    #[test]
    fn acceptable_terms_are_stable(seed in 1u64..100_000, mode in 0usize..3) {
        let Some((ctx, t, _)) = marked(seed, mode) else { return Ok(()) };
        for p in sites(&t) {
            let u = sub(&t, &p.child(0));
            if !acceptable(&u) {
                continue;
            }
            let st = sorted(&st_ids(&u).unwrap());
            // substitutions
            for x in u.free_ivars() {
                let s = SubstIntu::single(x, Term::pair(Term::var("zz"), Term::var("zz")));
                let us = subst_intu(&u, &s);
                prop_assert!(acceptable(&us));
                prop_assert_eq!(&sorted(&st_ids(&us).unwrap()), &st);
            }
            for a in u.free_cvars() {
                let us = subst_class(&u, &SubstClass::new(a, Elim::Proj(Side::Left)));
                prop_assert!(acceptable(&us));
                prop_assert_eq!(&sorted(&st_ids(&us).unwrap()), &st);
            }
            // reduction
            let before: BTreeSet<_> = st.iter().cloned().collect();
            for (r, u2) in step_all_in(&ctx, &u) {
                prop_assert!(acceptable(&u2), "{} at {}", u, r);
                let after: BTreeSet<_> = st_ids(&u2).unwrap().into_iter().collect();
                prop_assert!(after.is_subset(&before), "{} at {}", u, r);
            }
        }
    }

    #[test]
    fn delivering_twice_is_delivering_once(seed in 1u64..100_000, mode in 0usize..3) {
        let Some((ctx, t, _)) = marked(seed, mode) else { return Ok(()) };
        for p in sites(&t) {
            let Term::App(n, e) = sub(&t, &p) else { unreachable!() };
            let whole = Term::App(n.clone(), e.clone());
            let inner = Term::App(Box::new(t2_in(&ctx, &n)), e);
            prop_assert!(alpha_eq(&t2_in(&ctx, &whole), &t2_in(&ctx, &inner)), "{}", whole);
        }
    }
}
