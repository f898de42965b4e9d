use std::collections::BTreeSet;

use evcat::corpus::{Sentence, Token};
use evcat::features::{quote_level, quote_ratio, NonCollocConfig};
use evcat::modelsearch::{g_squared, is_decomposable, model_dof, ContingencyTable, DecomposableModel};
use evcat::patterns::{extract_cooccurrence, extract_within5, PosClass};
use proptest::prelude::*;

const TAGS: [&str; 9] = ["VBD", "VB", "VBZ", "NN", "NNS", "JJ", "DT", "IN", "RB"];

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect()
}

/// A table, plus a decomposable edge set drawn from a bitmask.
fn table_and_model() -> impl Strategy<Value = (ContingencyTable, Vec<(usize, usize)>)> {
    (2usize..=5)
        .prop_flat_map(|n| (prop::collection::vec(2u32..=3, n), any::<u16>()))
        .prop_flat_map(|(arities, mask)| {
            let cells: usize = arities.iter().map(|&a| a as usize).product();
            (Just(arities), Just(mask), prop::collection::vec(0u64..12, cells))
        })
        .prop_filter_map("empty or not decomposable", |(arities, mask, counts)| {
            let n = arities.len();
            let edges: Vec<(usize, usize)> =
                pairs(n).into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, e)| e).collect();
            if !is_decomposable(&edges, n) {
                return None;
            }
            let mut cells = vec![Vec::new()];
            for &a in &arities {
                cells = cells
                    .into_iter()
                    .flat_map(|c: Vec<u32>| (0..a).map(move |v| [c.clone(), vec![v]].concat()))
                    .collect();
            }
            let ct = ContingencyTable::from_counts(arities, cells.into_iter().zip(counts)).ok()?;
            Some((ct, edges))
        })
}

fn sentence() -> impl Strategy<Value = Sentence> {
    prop::collection::vec((0..TAGS.len(), 0u8..6, any::<bool>()), 1..20).prop_map(|toks| {
        Sentence::new(
            toks.into_iter()
                .map(|(t, w, q)| {
                    let lemma = format!("l{w}");
                    let tok = Token::new(&lemma, TAGS[t], &lemma);
                    if q {
                        tok.quoted()
                    } else {
                        tok
                    }
                })
                .collect(),
        )
    })
}

proptest! {
    #[test]
    fn fitted_counts_sum_to_n((ct, edges) in table_and_model()) {
        let model = DecomposableModel::new(ct.num_vars(), &edges).unwrap();
        let fit = model.fit(&ct).unwrap();
        let mut cells = vec![Vec::new()];
        for &a in ct.arities() {
            cells = cells.into_iter().flat_map(|c: Vec<u32>| (0..a).map(move |v| [c.clone(), vec![v]].concat())).collect();
        }
        let mass: f64 = cells.iter().map(|c| fit.fitted(c)).sum();
        prop_assert!((mass - ct.total() as f64).abs() <= 1e-9 * ct.total() as f64);
    }

    #[test]
    fn removing_an_edge_adds_dof((ct, edges) in table_and_model()) {
        let n = ct.num_vars();
        let model = DecomposableModel::new(n, &edges).unwrap();
        let dof = model_dof(&model, ct.arities());
        prop_assert!(dof >= 0.0);
        for &(u, v) in &edges {
            if let Ok(smaller) = model.without_edge(u, v) {
                prop_assert!(model_dof(&smaller, ct.arities()) > dof);
                prop_assert!(g_squared(&smaller, &ct).unwrap() >= g_squared(&model, &ct).unwrap() - 1e-9);
            }
        }
    }

    #[test]
    fn g_squared_scales_with_counts((ct, edges) in table_and_model(), k in 2u64..6) {
        let model = DecomposableModel::new(ct.num_vars(), &edges).unwrap();
        let g = g_squared(&model, &ct).unwrap();
        let gk = g_squared(&model, &ct.scaled(k)).unwrap();
        prop_assert!((gk - k as f64 * g).abs() <= 1e-8 * (1.0 + gk));
    }

    #[test]
    fn quote_levels_partition(r in 0.0f64..=1.0, low in 0.0f64..0.5, width in 0.0f64..0.5) {
        let cfg = NonCollocConfig { quote_low: low, quote_high: low + width, ..Default::default() };
        let level = quote_level(r, &cfg);
        let expected = [r < low, (low..=low + width).contains(&r), r > low + width];
        prop_assert_eq!(expected.iter().filter(|&&b| b).count(), 1);
        prop_assert!(expected[level as usize]);
    }

    #[test]
    fn quote_ratio_is_a_share(s in sentence()) {
        let r = quote_ratio(&s);
        prop_assert!((0.0..=1.0).contains(&r));
    }

    #[test]
    fn within5_is_part_of_cooccurrence(s in sentence()) {
        for class in [PosClass::Verb, PosClass::Noun, PosClass::Adj] {
            // matches are per lemma, so compare lemma sets
            let cooc: BTreeSet<String> = extract_cooccurrence(&s, class).into_iter().map(|m| m.lemma).collect();
            for m in extract_within5(&s, class) {
                prop_assert!(cooc.contains(&m.lemma));
            }
        }
    }
}
