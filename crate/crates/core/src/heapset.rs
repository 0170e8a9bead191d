//! Position-tracked max-priority queues over subscribers.
//!
//! One queue per offer type, keyed by the subscriber's expected revenue under
//! that offer. Every queue records where each subscriber sits, so a
//! subscriber can be removed from all `k` queues in `O(k log n)`. The
//! per-queue position columns together form the `n x k` lookup table.
//!
//! Entries are ordered by key descending, then by id ascending. Across
//! queues, ties are broken by the lower offer index.

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::model::{validate_subscribers, OfferCatalog, Subscriber};

const ABSENT: u32 = u32::MAX;

#[inline]
fn outranks(key_a: f64, id_a: u32, key_b: f64, id_b: u32) -> bool {
    key_a > key_b || (key_a == key_b && id_a < id_b)
}

#[derive(Debug, Clone, Copy)]
#[repr(C, packed(4))]
struct Entry {
    key: f64,
    id: u32,
}

impl Entry {
    #[inline]
    fn outranks(self, other: Entry) -> bool {
        outranks(self.key, self.id, other.key, other.id)
    }
}

/// Array-backed binary max-heap over ids `0..universe`, with an id to
/// position index.
#[derive(Debug, Clone)]
pub struct PriorityQueue {
    // key and id side by side, so a sift touches one cache line per level
    heap: Vec<Entry>,
    pos: Vec<u32>,
}

impl PriorityQueue {
    /// Empty queue able to hold ids `0..universe`.
    pub fn with_universe(universe: usize) -> Self {
        assert!(universe < ABSENT as usize, "universe too large");
        PriorityQueue {
            heap: Vec::new(),
            pos: vec![ABSENT; universe],
        }
    }

    /// Queue holding id `i` with key `keys[i]`, built by bottom-up heapify.
    pub fn from_keys(keys: Vec<f64>) -> Self {
        let n = keys.len();
        assert!(n < ABSENT as usize, "universe too large");
        let heap = keys
            .into_iter()
            .zip(0u32..)
            .map(|(key, id)| Entry { key, id })
            .collect();
        let mut q = PriorityQueue {
            heap,
            pos: (0..n as u32).collect(),
        };
        for p in (0..n / 2).rev() {
            q.sift_down(p);
        }
        q
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn universe(&self) -> usize {
        self.pos.len()
    }

    /// Front element as `(id, key)`.
    pub fn peek(&self) -> Option<(usize, f64)> {
        self.heap.first().map(|e| (e.id as usize, e.key))
    }

    pub fn position(&self, id: usize) -> Option<usize> {
        match self.pos.get(id) {
            Some(&p) if p != ABSENT => Some(p as usize),
            _ => None,
        }
    }

    pub fn contains(&self, id: usize) -> bool {
        self.position(id).is_some()
    }

    pub fn key_of(&self, id: usize) -> Option<f64> {
        self.position(id).map(|p| self.heap[p].key)
    }

    /// `(id, key)` pairs in array order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.heap.iter().map(|e| (e.id as usize, e.key))
    }

    /// Returns false if `id` is already present.
    pub fn insert(&mut self, id: usize, key: f64) -> bool {
        assert!(id < self.pos.len(), "id {id} outside universe");
        if self.contains(id) {
            return false;
        }
        let p = self.heap.len();
        self.heap.push(Entry { key, id: id as u32 });
        self.pos[id] = p as u32;
        self.sift_up(p);
        true
    }

    /// Removes `id` wherever it sits; returns its key.
    pub fn remove(&mut self, id: usize) -> Option<f64> {
        let p = self.position(id)?;
        let key = self.heap[p].key;
        self.pos[id] = ABSENT;
        let moved = self.heap.pop().expect("non-empty");
        if p != self.heap.len() {
            self.heap[p] = moved;
            self.pos[moved.id as usize] = p as u32;
            self.restore(p);
        }
        Some(key)
    }

    /// Changes the key of a present id; returns false if absent.
    pub fn update(&mut self, id: usize, key: f64) -> bool {
        let Some(p) = self.position(id) else {
            return false;
        };
        self.heap[p].key = key;
        self.restore(p);
        true
    }

    fn restore(&mut self, p: usize) {
        if p > 0 && self.heap[p].outranks(self.heap[(p - 1) / 2]) {
            self.sift_up(p);
        } else {
            self.sift_down(p);
        }
    }

    fn sift_up(&mut self, mut p: usize) {
        let e = self.heap[p];
        while p > 0 {
            let parent = (p - 1) / 2;
            if !e.outranks(self.heap[parent]) {
                break;
            }
            self.place(p, parent);
            p = parent;
        }
        self.set(p, e);
    }

    fn sift_down(&mut self, mut p: usize) {
        let n = self.heap.len();
        let e = self.heap[p];
        loop {
            let left = 2 * p + 1;
            if left >= n {
                break;
            }
            let right = left + 1;
            let child = if right < n && self.heap[right].outranks(self.heap[left]) {
                right
            } else {
                left
            };
            if !self.heap[child].outranks(e) {
                break;
            }
            self.place(p, child);
            p = child;
        }
        self.set(p, e);
    }

    // Moves the element at `from` into slot `to`.
    #[inline]
    fn place(&mut self, to: usize, from: usize) {
        let e = self.heap[from];
        self.set(to, e);
    }

    #[inline]
    fn set(&mut self, p: usize, e: Entry) {
        self.heap[p] = e;
        self.pos[e.id as usize] = p as u32;
    }

    /// Verifies the heap order and the position index in both directions.
    pub fn check(&self) -> std::result::Result<(), String> {
        for p in 1..self.heap.len() {
            if self.heap[p].outranks(self.heap[(p - 1) / 2]) {
                return Err(format!("heap order violated at position {p}"));
            }
        }
        for (p, e) in self.heap.iter().enumerate() {
            if self.pos[e.id as usize] as usize != p {
                return Err(format!(
                    "id {} at position {p} indexed at {}",
                    e.id, self.pos[e.id as usize]
                ));
            }
        }
        let indexed = self.pos.iter().filter(|&&p| p != ABSENT).count();
        if indexed != self.heap.len() {
            return Err(format!(
                "{indexed} ids indexed but {} stored",
                self.heap.len()
            ));
        }
        Ok(())
    }
}

/// How the maximum over queue fronts is found.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RootSelector {
    /// Linear scan of the root list, `O(k)`.
    #[default]
    Scan,
    /// A `k`-element priority queue over the fronts, `O(log k)`.
    Tournament,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub subscriber: usize,
    pub key: f64,
}

#[derive(Debug, Clone)]
struct OfferQueue {
    heap: PriorityQueue,
    deleted: bool,
}

#[derive(Debug, Clone)]
pub struct HeapSet {
    queues: Vec<OfferQueue>,
    roots: Vec<Option<Root>>,
    selector: RootSelector,
    root_queue: PriorityQueue,
    removed: Vec<bool>,
    remaining: usize,
}

impl HeapSet {
    pub fn build(subscribers: &[Subscriber], catalog: &OfferCatalog) -> Result<Self> {
        Self::build_with(
            subscribers,
            catalog,
            Exec::default(),
            RootSelector::default(),
        )
    }

    pub fn build_with(
        subscribers: &[Subscriber],
        catalog: &OfferCatalog,
        exec: Exec,
        selector: RootSelector,
    ) -> Result<Self> {
        validate_subscribers(subscribers)?;
        catalog.validate()?;
        let heaps = exec.map_range(catalog.len(), |j| {
            let value = catalog.offers[j].value;
            PriorityQueue::from_keys(subscribers.iter().map(|s| s.revenue(value)).collect())
        });
        Ok(Self::assemble(heaps, subscribers.len(), selector))
    }

    /// Builds from explicit key columns: `columns[j][i]` is the key of
    /// subscriber `i` in queue `j`.
    pub fn from_key_columns(columns: Vec<Vec<f64>>, selector: RootSelector) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        if columns.is_empty() {
            return Err(Error::EmptyCatalog);
        }
        if columns.iter().any(|c| c.len() != n) {
            return Err(Error::InvalidInstance(
                "key columns differ in length".into(),
            ));
        }
        if let Some(&value) = columns.iter().flatten().find(|k| k.is_nan()) {
            return Err(Error::Domain { name: "key", value });
        }
        let heaps = columns.into_iter().map(PriorityQueue::from_keys).collect();
        Ok(Self::assemble(heaps, n, selector))
    }

    fn assemble(heaps: Vec<PriorityQueue>, n: usize, selector: RootSelector) -> Self {
        let k = heaps.len();
        let mut hs = HeapSet {
            queues: heaps
                .into_iter()
                .map(|heap| OfferQueue {
                    heap,
                    deleted: false,
                })
                .collect(),
            roots: vec![None; k],
            selector,
            root_queue: PriorityQueue::with_universe(if selector == RootSelector::Tournament {
                k
            } else {
                0
            }),
            removed: vec![false; n],
            remaining: n,
        };
        for j in 0..k {
            hs.refresh_root(j);
        }
        hs
    }

    fn refresh_root(&mut self, j: usize) {
        let q = &self.queues[j];
        let root = if q.deleted {
            None
        } else {
            q.heap
                .peek()
                .map(|(subscriber, key)| Root { subscriber, key })
        };
        self.roots[j] = root;
        if self.selector == RootSelector::Tournament {
            match root {
                Some(r) => {
                    if !self.root_queue.update(j, r.key) {
                        self.root_queue.insert(j, r.key);
                    }
                }
                None => {
                    self.root_queue.remove(j);
                }
            }
        }
    }

    /// Number of offer types `k`.
    pub fn k(&self) -> usize {
        self.queues.len()
    }

    /// Number of subscribers the set was built over.
    pub fn n(&self) -> usize {
        self.removed.len()
    }

    pub fn remaining_subscribers(&self) -> usize {
        self.remaining
    }

    pub fn selector(&self) -> RootSelector {
        self.selector
    }

    pub fn is_live(&self, j: usize) -> bool {
        self.queues.get(j).is_some_and(|q| !q.deleted)
    }

    pub fn is_deleted_subscriber(&self, i: usize) -> bool {
        self.removed.get(i).copied().unwrap_or(false)
    }

    /// The root list: front of each live non-empty queue.
    pub fn roots(&self) -> &[Option<Root>] {
        &self.roots
    }

    /// Live queue `j`, if any.
    pub fn queue(&self, j: usize) -> Option<&PriorityQueue> {
        self.queues.get(j).filter(|q| !q.deleted).map(|q| &q.heap)
    }

    /// Lookup table entry: position of subscriber `i` inside live queue `j`.
    pub fn lookup(&self, i: usize, j: usize) -> Option<usize> {
        self.queue(j)?.position(i)
    }

    /// Maximum front over live queues as `(subscriber, offer, key)`.
    pub fn peek_max(&self) -> Option<(usize, usize, f64)> {
        match self.selector {
            RootSelector::Scan => {
                let mut best: Option<(usize, Root)> = None;
                for (j, root) in self.roots.iter().enumerate() {
                    let Some(r) = root else { continue };
                    // strict: equal keys keep the lower offer index
                    if best.is_none_or(|(_, b)| r.key > b.key) {
                        best = Some((j, *r));
                    }
                }
                best.map(|(j, r)| (r.subscriber, j, r.key))
            }
            RootSelector::Tournament => {
                let (j, key) = self.root_queue.peek()?;
                Some((self.roots[j].unwrap().subscriber, j, key))
            }
        }
    }

    /// `(subscriber, offer)` with the largest key among all live fronts.
    pub fn find_max_of_max(&self) -> Result<(usize, usize)> {
        self.peek_max()
            .map(|(i, j, _)| (i, j))
            .ok_or(Error::NoLiveQueue)
    }

    /// Removes subscriber `i` from every live queue.
    pub fn delete_subscriber(&mut self, i: usize) -> Result<()> {
        match self.removed.get(i) {
            None => return Err(Error::UnknownSubscriber(i)),
            Some(true) => return Err(Error::SubscriberAlreadyDeleted(i)),
            Some(false) => {}
        }
        self.removed[i] = true;
        self.remaining -= 1;
        for j in 0..self.queues.len() {
            let q = &mut self.queues[j];
            if q.deleted {
                continue;
            }
            let was_root = q.heap.peek().is_some_and(|(id, _)| id == i);
            q.heap.remove(i);
            if was_root {
                self.refresh_root(j);
            }
        }
        Ok(())
    }

    /// Tombstones queue `j`, releasing its storage.
    pub fn delete_queue(&mut self, j: usize) -> Result<()> {
        let q = self.queues.get_mut(j).ok_or(Error::UnknownOffer(j))?;
        if q.deleted {
            return Err(Error::QueueAlreadyDeleted(j));
        }
        q.deleted = true;
        q.heap = PriorityQueue::with_universe(0);
        self.refresh_root(j);
        Ok(())
    }

    /// Checks heap order, lookup consistency, root list and removal state.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        for (j, q) in self.queues.iter().enumerate() {
            if q.deleted {
                if self.roots[j].is_some() {
                    return Err(format!("deleted queue {j} still has a root"));
                }
                continue;
            }
            q.heap.check().map_err(|e| format!("queue {j}: {e}"))?;
            for (i, &gone) in self.removed.iter().enumerate() {
                if gone == q.heap.contains(i) {
                    return Err(format!(
                        "queue {j}: subscriber {i} presence disagrees with removal state"
                    ));
                }
            }
            let front = q
                .heap
                .peek()
                .map(|(subscriber, key)| Root { subscriber, key });
            if front != self.roots[j] {
                return Err(format!("root list entry {j} is stale"));
            }
        }
        if self.selector == RootSelector::Tournament {
            self.root_queue
                .check()
                .map_err(|e| format!("root queue: {e}"))?;
            for (j, root) in self.roots.iter().enumerate() {
                if root.map(|r| r.key) != self.root_queue.key_of(j) {
                    return Err(format!("root queue entry {j} is stale"));
                }
            }
        }
        Ok(())
    }
}
