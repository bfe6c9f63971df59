use super::Tree;

fn replace(slot: &mut [u32; 3], from: usize, to: usize) {
    let i = slot
        .iter()
        .position(|&x| x as usize == from)
        .expect("edge endpoint present");
    slot[i] = to as u32;
}

/// Exchanges subtree `x` (hanging off `u`) with subtree `y` (hanging off `v`)
/// across the internal edge `u - v`.
pub(crate) fn swap_across(tree: &Tree, u: usize, v: usize, x: usize, y: usize) -> Tree {
    let mut adj = tree.adjacency().to_vec();
    replace(&mut adj[u], x, y);
    replace(&mut adj[v], y, x);
    replace(&mut adj[x], u, v);
    replace(&mut adj[y], v, u);
    Tree::from_parts(tree.shared_labels().clone(), adj)
}

/// Both interchanges across every internal edge, edges in ascending order:
/// `2(n - 3)` trees, pairwise distinct.
pub(crate) fn nni_neighbors(tree: &Tree) -> Vec<Tree> {
    let mut out = Vec::new();
    for (u, v) in tree.internal_edges() {
        let a = tree.neighbors(u).find(|&w| w != v).expect("degree 3");
        let mut cd = tree.neighbors(v).filter(|&w| w != u);
        let (c, d) = (cd.next().expect("degree 3"), cd.next().expect("degree 3"));
        out.push(swap_across(tree, u, v, a, c));
        out.push(swap_across(tree, u, v, a, d));
    }
    out
}
