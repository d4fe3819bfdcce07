use std::collections::HashMap;

use thompson_core::harmonic::{golden_path_values, is_superharmonic_on, PhiU};
use thompson_core::value::{int, pow2};
use thompson_core::{phi_family, Dyadic, Gen, Orientation, SchreierGraph, StructuralAddress, Value};

/// The structural rules must reproduce the dyadic action on every edge of a ball.
#[test]
fn structural_action_agrees_with_dyadic_action() {
    let g = SchreierGraph::default();
    let ball = g.ball(&Dyadic::root(), 11).unwrap();
    for x in &ball.vertices {
        let a = g.classify(x).unwrap();
        assert_eq!(&g.realize(&a), x);
        for gen in Gen::ALL {
            let y = gen.apply(x);
            let fresh = g.classify(&y).unwrap();
            assert_eq!(fresh, a.apply(gen), "{x} --{gen}--> {y}");
        }
    }
}

#[test]
fn skeleton_is_binary_tree_with_expected_hairs() {
    let g = SchreierGraph::default();
    let ball = g.ball(&Dyadic::root(), 10).unwrap();
    let addr: HashMap<&Dyadic, StructuralAddress> =
        ball.vertices.iter().map(|x| (x, g.classify(x).unwrap())).collect();
    let mut skeleton = 0;
    for (x, a) in &addr {
        // graph distance equals depth + offset on a tree with rays
        assert_eq!(ball.dist_of(x).unwrap() as u64, a.dist_to_root());
        if !a.is_skeleton() || ball.dist_of(x).unwrap() >= 10 {
            continue;
        }
        skeleton += 1;
        let nbrs: Vec<StructuralAddress> = g.neighbors(x).iter().map(|(_, y)| g.classify(y).unwrap()).collect();
        let hairs = nbrs.iter().filter(|b| b.offset() == 1).count();
        let parents = nbrs.iter().filter(|b| b.is_skeleton() && b.depth() + 1 == a.depth()).count();
        let children = nbrs.iter().filter(|b| b.is_skeleton() && b.depth() == a.depth() + 1).count();
        if a.is_root() {
            assert_eq!((hairs, parents, children), (2, 0, 2));
        } else {
            assert_eq!((hairs, parents, children), (1, 1, 2), "{x} = {a}");
        }
    }
    assert_eq!(skeleton, (1 << 10) - 1);
}

#[test]
fn hair_vertices_have_two_distinct_neighbors() {
    let g = SchreierGraph::default();
    for x in &g.ball(&Dyadic::root(), 9).unwrap().vertices {
        let a = g.classify(x).unwrap();
        let expected = if a.is_skeleton() { 4 } else { 2 };
        assert_eq!(g.distinct_degree(x), expected, "{x}");
    }
}

#[test]
fn phi_u_defect_is_one_at_root_only() {
    let g = SchreierGraph::default();
    let ball = g.ball(&Dyadic::root(), 12).unwrap();
    let rep = is_superharmonic_on(&g, &PhiU, &ball, &Value::from_integer(0.into())).unwrap();
    assert!(rep.ok());
    for row in &rep.rows {
        let expected = if row.vertex == Dyadic::root() { int(1) } else { int(0) };
        assert_eq!(row.margin, expected, "{}", row.vertex);
    }
}

#[test]
fn golden_path_pattern() {
    let g = SchreierGraph::default();
    for i in 0..=6u32 {
        let vals = golden_path_values(&g, phi_family(i, Orientation::Lr).as_ref(), i).unwrap();
        let (last, rest) = vals.split_last().unwrap();
        assert!(rest.iter().all(|v| *v == pow2(-(i as i64))));
        assert_eq!(*last, pow2(-(i as i64) - 1));
        let path = g.golden_path(i);
        assert!(g.subtree_t(i, path.last().unwrap()).unwrap());
        assert!(path[..=i as usize].iter().all(|x| g.t_index(x).unwrap().is_none()));
    }
    let golden2: Vec<String> = g.golden_path(2).iter().map(|x| x.to_string()).collect();
    let a1 = Gen::A.apply(&Dyadic::root());
    let a2 = Gen::A.apply(&a1);
    let expected = [Dyadic::root(), a1, a2.clone(), Gen::B.apply(&a2)];
    assert_eq!(golden2, expected.iter().map(|x| x.to_string()).collect::<Vec<_>>());
}

#[test]
fn subtrees_are_disjoint_and_cover() {
    let g = SchreierGraph::default();
    let b = g.ball(&Dyadic::root(), 8).unwrap();
    for x in &b.vertices {
        let hits = (0..8).filter(|&i| g.subtree_t(i, x).unwrap()).count();
        let spine = g.t_index(x).unwrap().is_none();
        assert_eq!(hits + spine as usize, 1);
    }
    assert!(g.subtree_t(0, &Gen::B.apply(&Dyadic::root())).unwrap());
    assert!(!(0..20).any(|i| g.subtree_t(i, &Dyadic::root()).unwrap()));
}

#[test]
fn ball_is_deterministic_and_growing() {
    let g = SchreierGraph::default();
    let mut last = 0;
    for r in 0..8 {
        let b1 = g.ball(&Dyadic::root(), r).unwrap();
        let b2 = SchreierGraph::default().ball(&Dyadic::root(), r).unwrap();
        assert_eq!(b1.vertices, b2.vertices);
        assert_eq!(b1.edges, b2.edges);
        assert!(b1.len() >= last);
        last = b1.len();
        for x in b1.interior() {
            let ends = b1.edges.iter().filter(|e| &b1.vertices[e.from] == x).count();
            assert_eq!(ends, 4);
        }
    }
}
