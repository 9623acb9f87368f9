//! Disjoint-set forest with path halving and union by size.

#[derive(Clone, Debug)]
pub(crate) struct UnionFind {
    parent: Vec<u8>,
    size: Vec<u8>,
    components: usize,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        debug_assert!(n <= u8::MAX as usize);
        UnionFind {
            parent: (0..n as u8).collect(),
            size: vec![1; n],
            components: n,
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] as usize != x {
            let grand = self.parent[self.parent[x] as usize];
            self.parent[x] = grand;
            x = grand as usize;
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a as u8;
        self.size[a] += self.size[b];
        self.components -= 1;
    }

    pub(crate) fn components(&self) -> usize {
        self.components
    }
}
