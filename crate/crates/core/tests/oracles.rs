// SPDX-License-Identifier: Apache-2.0

mod common;

use common::oracles::{lp_vs_vertices, online_vs_policy_tree, single_item_revenue};

#[test]
fn lp_matches_vertex_enumeration() {
    lp_vs_vertices(50, 11).unwrap();
}

#[test]
fn single_item_optimum_is_a_posted_price() {
    single_item_revenue(50, 12).unwrap();
}

#[test]
fn online_optimum_matches_policy_tree_search() {
    online_vs_policy_tree(20, 13).unwrap();
}
