use std::collections::BTreeSet;

use frobperf_core::components::groupoid_pi0;
use frobperf_core::groupoid::{
    groupoid_closure, is_isomorphism, morphism_violations, ClosureConfig, Groupoid, GroupoidMap, Pregroupoid,
    PregroupoidBuilder,
};
use proptest::prelude::*;

fn reachability(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<bool>> {
    let mut reach = vec![vec![false; n]; n];
    for (x, row) in reach.iter_mut().enumerate() {
        row[x] = true;
    }
    for &(a, b) in edges {
        reach[a][b] = true;
        reach[b][a] = true;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if reach[i][k] && reach[k][j] {
                    reach[i][j] = true;
                }
            }
        }
    }
    reach
}

/// A symmetric reflexive relation whose non-reflexive part is a forest.
fn forest(n: usize, parents: &[Option<usize>]) -> Pregroupoid {
    let names: Vec<String> = (0..n).map(|k| k.to_string()).collect();
    let mut b = PregroupoidBuilder::new(&names);
    for (x, parent) in parents.iter().enumerate() {
        if let Some(y) = parent {
            let (xs, ys) = (x.to_string(), y.to_string());
            b.arrow_pair(&format!("{ys}~{xs}"), &format!("{xs}~{ys}"), &xs, &ys).unwrap();
        }
    }
    b.build()
}

fn parents(n: usize, choices: &[usize], keep: &[bool]) -> Vec<Option<usize>> {
    (0..n).map(|x| (x > 0 && keep[x]).then(|| choices[x] % x)).collect()
}

proptest! {
    #[test]
    fn orbits_match_reachability(n in 1usize..50, raw in prop::collection::vec((0usize..50, 0usize..50), 0..80)) {
        let edges: Vec<(usize, usize)> = raw.into_iter().map(|(a, b)| (a % n, b % n)).collect();
        let orbits = groupoid_pi0(n, &edges).unwrap();
        let reach = reachability(n, &edges);
        let mut covered = 0;
        for orbit in &orbits {
            covered += orbit.len();
            for &a in orbit {
                for b in 0..n {
                    prop_assert_eq!(reach[a][b], orbit.contains(&b));
                }
            }
        }
        prop_assert_eq!(covered, n);
    }

    #[test]
    fn forests_close_to_their_transitive_closure(
        n in 1usize..7,
        choices in prop::collection::vec(0usize..7, 7),
        keep in prop::collection::vec(any::<bool>(), 7),
    ) {
        let par = parents(n, &choices, &keep);
        let p = forest(n, &par);
        prop_assert!(p.validate().is_empty());
        let cl = groupoid_closure(&p, &ClosureConfig::default()).unwrap();
        let g = cl.groupoid.as_ref().expect("forests have finite closures");
        prop_assert!(g.axiom_violations().is_empty());
        prop_assert_eq!(g.to_pregroupoid().structure_maps_bijective(), (true, true));
        prop_assert!(morphism_violations(&p, g, &cl.canonical).is_empty());

        let edges: Vec<(usize, usize)> = par.iter().enumerate().filter_map(|(x, y)| y.map(|y| (x, y))).collect();
        let reach = reachability(n, &edges);
        let expected: BTreeSet<(usize, usize)> =
            (0..n).flat_map(|x| (0..n).map(move |y| (x, y))).filter(|&(x, y)| reach[x][y]).collect();
        let got: Vec<(usize, usize)> = (0..g.arrows.len()).map(|a| (g.source[a], g.target[a])).collect();
        prop_assert_eq!(got.len(), expected.len());
        prop_assert_eq!(got.into_iter().collect::<BTreeSet<_>>(), expected);

        let again = groupoid_closure(&g.to_pregroupoid(), &ClosureConfig::default()).unwrap();
        prop_assert!(is_isomorphism(g, again.groupoid.as_ref().unwrap(), &again.canonical));
        let ge: Vec<(usize, usize)> = (0..g.arrows.len()).map(|a| (g.source[a], g.target[a])).collect();
        prop_assert_eq!(groupoid_pi0(n, &p.edges()).unwrap(), groupoid_pi0(n, &ge).unwrap());
    }

    #[test]
    fn groups_are_their_own_closure(n in 1usize..6) {
        let g = Groupoid::cyclic(n);
        let cl = groupoid_closure(&g.to_pregroupoid(), &ClosureConfig::default()).unwrap();
        let id = GroupoidMap { objects: vec![0], arrows: (0..n).collect() };
        prop_assert!(is_isomorphism(&g, cl.groupoid.as_ref().unwrap(), &cl.canonical));
        prop_assert_eq!(cl.canonical, id);
    }
}
