//! Todd-Coxeter coset enumeration (HLT strategy) over the trivial subgroup.
//!
//! Generator `g` acts through column `2g`, its inverse through column
//! `2g + 1`. Enumerating the cosets of the trivial subgroup yields the
//! regular representation: cosets are exactly the group elements.

use thiserror::Error;

const UNDEF: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TcError {
    #[error("coset enumeration exceeded the budget of {max_cosets} cosets (possibly infinite group)")]
    MaxCosetsExceeded { max_cosets: usize },
}

/// A closed, compressed, canonically numbered coset table.
///
/// Numbering is breadth-first from coset 0 following columns in order, so two
/// runs over the same presentation produce identical tables.
#[derive(Debug, Clone)]
pub struct CosetTable {
    pub ngens: usize,
    pub n_cosets: usize,
    neighbors: Vec<u32>,
    /// For every coset i >= 1, the BFS edge (parent, column) with
    /// parent . column = i. Traversing it spells a representative word.
    tree: Vec<(u32, u16)>,
}

impl CosetTable {
    pub fn ncols(&self) -> usize {
        2 * self.ngens
    }

    pub fn neighbor(&self, coset: usize, col: usize) -> usize {
        self.neighbors[coset * self.ncols() + col] as usize
    }

    pub fn tree_edge(&self, coset: usize) -> (u32, u16) {
        debug_assert!(coset >= 1);
        self.tree[coset - 1]
    }

    pub const fn gen_col(g: usize) -> usize {
        2 * g
    }

    pub const fn inv_col(col: usize) -> usize {
        col ^ 1
    }
}

struct Enumerator {
    ncols: usize,
    table: Vec<u32>,
    parent: Vec<u32>,
    alive: usize,
    defined: usize,
    max_cosets: usize,
}

impl Enumerator {
    fn new(ngens: usize, max_cosets: usize) -> Self {
        let ncols = 2 * ngens;
        Enumerator {
            ncols,
            table: vec![UNDEF; ncols],
            parent: vec![0],
            alive: 1,
            defined: 1,
            max_cosets,
        }
    }

    fn nrows(&self) -> usize {
        self.parent.len()
    }

    fn get(&self, c: u32, x: u16) -> u32 {
        self.table[c as usize * self.ncols + x as usize]
    }

    fn set(&mut self, c: u32, x: u16, v: u32) {
        self.table[c as usize * self.ncols + x as usize] = v;
    }

    fn is_alive(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    fn find(&mut self, mut c: u32) -> u32 {
        while self.parent[c as usize] != c {
            let gp = self.parent[self.parent[c as usize] as usize];
            self.parent[c as usize] = gp;
            c = gp;
        }
        c
    }

    fn define(&mut self, c: u32, x: u16) -> Result<u32, TcError> {
        if self.defined >= self.max_cosets {
            return Err(TcError::MaxCosetsExceeded { max_cosets: self.max_cosets });
        }
        let n = self.nrows() as u32;
        self.parent.push(n);
        self.table.extend(std::iter::repeat_n(UNDEF, self.ncols));
        self.defined += 1;
        self.alive += 1;
        self.set(c, x, n);
        self.set(n, x ^ 1, c);
        Ok(n)
    }

    fn merge(&mut self, a: u32, b: u32, queue: &mut Vec<u32>) {
        let a = self.find(a);
        let b = self.find(b);
        if a == b {
            return;
        }
        let (keep, dead) = if a < b { (a, b) } else { (b, a) };
        self.parent[dead as usize] = keep;
        self.alive -= 1;
        queue.push(dead);
    }

    /// Processes the coincidence a = b, transferring table rows of dead
    /// cosets onto their surviving representatives.
    fn coincidence(&mut self, a: u32, b: u32) {
        let mut queue = Vec::new();
        self.merge(a, b, &mut queue);
        while let Some(e) = queue.pop() {
            for x in 0..self.ncols as u16 {
                let f = self.get(e, x);
                if f == UNDEF {
                    continue;
                }
                // Remove the mirror edge before transferring, so stale
                // references to `e` cannot survive.
                self.set(f, x ^ 1, UNDEF);
                let e1 = self.find(e);
                let f1 = self.find(f);
                let ex = self.get(e1, x);
                if ex != UNDEF {
                    self.merge(f1, ex, &mut queue);
                } else {
                    let fx = self.get(f1, x ^ 1);
                    if fx != UNDEF {
                        self.merge(e1, fx, &mut queue);
                    } else {
                        self.set(e1, x, f1);
                        self.set(f1, x ^ 1, e1);
                    }
                }
            }
        }
    }

    /// Scans relator `w` at coset `a0`, filling gaps by definition, until the
    /// scan completes cleanly or `a0`'s class representative dies.
    fn scan_and_fill(&mut self, a0: u32, w: &[u16]) -> Result<(), TcError> {
        'rescan: loop {
            let a = self.find(a0);
            let mut f = a;
            let mut b = a;
            let mut i = 0usize;
            let mut j = w.len();
            loop {
                while i < j {
                    let n = self.get(f, w[i]);
                    if n == UNDEF {
                        break;
                    }
                    f = n;
                    i += 1;
                }
                if i == j {
                    if f != b {
                        self.coincidence(f, b);
                        continue 'rescan;
                    }
                    return Ok(());
                }
                while j > i {
                    let n = self.get(b, w[j - 1] ^ 1);
                    if n == UNDEF {
                        break;
                    }
                    b = n;
                    j -= 1;
                }
                if j == i {
                    if f != b {
                        self.coincidence(f, b);
                        continue 'rescan;
                    }
                    return Ok(());
                }
                if j == i + 1 {
                    // Single gap: deduction closes the cycle.
                    self.set(f, w[i], b);
                    self.set(b, w[i] ^ 1, f);
                    return Ok(());
                }
                f = self.define(f, w[i])?;
                i += 1;
            }
        }
    }
}

/// Enumerates the cosets of the trivial subgroup in the group presented by
/// `relators` (sequences of column indices) on `ngens` generators.
pub fn enumerate_cosets(
    ngens: usize,
    relators: &[Vec<u16>],
    max_cosets: usize,
) -> Result<CosetTable, TcError> {
    assert!(ngens > 0, "need at least one generator");
    let mut e = Enumerator::new(ngens, max_cosets);
    let mut current: u32 = 0;
    while (current as usize) < e.nrows() {
        if !e.is_alive(current) {
            current += 1;
            continue;
        }
        let mut died = false;
        for r in relators {
            e.scan_and_fill(current, r)?;
            if !e.is_alive(current) {
                died = true;
                break;
            }
        }
        if !died {
            for x in 0..e.ncols as u16 {
                if e.get(current, x) == UNDEF {
                    e.define(current, x)?;
                }
            }
        }
        current += 1;
    }

    // Closed table over live cosets; renumber canonically by BFS.
    let ncols = e.ncols;
    let nrows = e.nrows();
    let mut new_id = vec![UNDEF; nrows];
    let mut order: Vec<u32> = Vec::with_capacity(e.alive);
    let mut tree = Vec::with_capacity(e.alive.saturating_sub(1));
    debug_assert!(e.is_alive(0));
    new_id[0] = 0;
    order.push(0);
    let mut head = 0;
    while head < order.len() {
        let c = order[head];
        head += 1;
        for x in 0..ncols as u16 {
            let raw = e.get(c, x);
            assert!(raw != UNDEF, "enumeration left an open entry");
            let n = e.find(raw);
            if new_id[n as usize] == UNDEF {
                new_id[n as usize] = order.len() as u32;
                tree.push((new_id[c as usize], x));
                order.push(n);
            }
        }
    }
    assert_eq!(order.len(), e.alive, "coset graph must be connected");

    let n_cosets = order.len();
    let mut neighbors = vec![UNDEF; n_cosets * ncols];
    for (ni, &c) in order.iter().enumerate() {
        for x in 0..ncols as u16 {
            let n = e.find(e.get(c, x));
            neighbors[ni * ncols + x as usize] = new_id[n as usize];
        }
    }

    let ct = CosetTable { ngens, n_cosets, neighbors, tree };
    // Every relator must trace back to its start from every coset; this is
    // what makes the closed table the regular representation.
    for c in 0..n_cosets {
        for r in relators {
            let mut p = c;
            for &x in r {
                p = ct.neighbor(p, x as usize);
            }
            assert_eq!(p, c, "closed table fails a relator trace");
        }
    }
    Ok(ct)
}
