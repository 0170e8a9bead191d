use offeropt::heapset::{HeapSet, RootSelector};
use offeropt::Error;
use proptest::prelude::*;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Reference model: key columns plus deletion flags, answered by linear scan.
struct Model {
    columns: Vec<Vec<f64>>,
    gone: Vec<bool>,
    dead: Vec<bool>,
}

impl Model {
    fn new(columns: Vec<Vec<f64>>) -> Self {
        let n = columns[0].len();
        let k = columns.len();
        Model {
            columns,
            gone: vec![false; n],
            dead: vec![false; k],
        }
    }

    fn best(&self) -> Option<(usize, usize)> {
        let mut best: Option<(f64, usize, usize)> = None;
        for (j, col) in self.columns.iter().enumerate() {
            if self.dead[j] {
                continue;
            }
            for (i, &key) in col.iter().enumerate() {
                if self.gone[i] {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bk, bj, bi)) => {
                        key > bk || (key == bk && (j < bj || (j == bj && i < bi)))
                    }
                };
                if better {
                    best = Some((key, j, i));
                }
            }
        }
        best.map(|(_, j, i)| (i, j))
    }

    fn live_keys(&self, j: usize) -> Vec<f64> {
        let mut keys: Vec<f64> = self.columns[j]
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.gone[*i])
            .map(|(_, &k)| k)
            .collect();
        keys.sort_by(f64::total_cmp);
        keys
    }
}

fn random_columns(rng: &mut ChaCha8Rng, n: usize, k: usize, distinct: u64) -> Vec<Vec<f64>> {
    // a small key alphabet forces plenty of ties
    (0..k)
        .map(|_| {
            (0..n)
                .map(|_| (rng.next_u64() % distinct) as f64 * 0.5)
                .collect()
        })
        .collect()
}

fn queue_keys(hs: &HeapSet, j: usize) -> Vec<f64> {
    let mut keys: Vec<f64> = hs.queue(j).unwrap().entries().map(|(_, k)| k).collect();
    keys.sort_by(f64::total_cmp);
    keys
}

fn assert_consistent(hs: &HeapSet, model: &Model) {
    hs.check_invariants().unwrap();
    assert_eq!(hs.find_max_of_max().ok(), model.best());
    for j in 0..hs.k() {
        if model.dead[j] {
            assert!(!hs.is_live(j));
            continue;
        }
        assert_eq!(queue_keys(hs, j), model.live_keys(j));
        for i in 0..hs.n() {
            let pos = hs.lookup(i, j);
            if model.gone[i] {
                assert_eq!(pos, None);
            } else {
                let pos = pos.expect("live subscriber is indexed");
                let q = hs.queue(j).unwrap();
                assert_eq!(q.entries().nth(pos).unwrap().0, i);
            }
        }
    }
}

#[test]
fn max_of_max_matches_exhaustive_scan() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let cols = random_columns(&mut rng, 20, 4, 1000);
        let model = Model::new(cols.clone());
        for sel in [RootSelector::Scan, RootSelector::Tournament] {
            let hs = HeapSet::from_key_columns(cols.clone(), sel).unwrap();
            assert_eq!(hs.find_max_of_max().ok(), model.best());
        }
    }
}

#[test]
fn deletions_match_rebuild_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..20 {
        let cols = random_columns(&mut rng, 50, 3, 40);
        let mut hs = HeapSet::from_key_columns(cols.clone(), RootSelector::Scan).unwrap();
        let mut model = Model::new(cols.clone());
        let mut deleted = 0;
        while deleted < 10 {
            let i = (rng.next_u64() % 50) as usize;
            if model.gone[i] {
                assert_eq!(
                    hs.delete_subscriber(i),
                    Err(Error::SubscriberAlreadyDeleted(i))
                );
                continue;
            }
            hs.delete_subscriber(i).unwrap();
            model.gone[i] = true;
            deleted += 1;
            // rebuild from scratch over the survivors and compare fronts
            let survivors: Vec<usize> = (0..50).filter(|&s| !model.gone[s]).collect();
            for (j, col) in cols.iter().enumerate() {
                let rebuilt =
                    offeropt::PriorityQueue::from_keys(survivors.iter().map(|&s| col[s]).collect());
                let (pos, key) = rebuilt.peek().unwrap();
                let front = hs.roots()[j].unwrap();
                assert_eq!(front.key, key);
                assert_eq!(front.subscriber, survivors[pos]);
            }
            assert_consistent(&hs, &model);
        }
    }
}

#[test]
fn deleted_queues_are_never_selected() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..30 {
        let cols = random_columns(&mut rng, 25, 4, 100);
        for sel in [RootSelector::Scan, RootSelector::Tournament] {
            let mut hs = HeapSet::from_key_columns(cols.clone(), sel).unwrap();
            let mut model = Model::new(cols.clone());
            hs.delete_queue(1).unwrap();
            hs.delete_queue(3).unwrap();
            model.dead[1] = true;
            model.dead[3] = true;
            while let Ok((i, j)) = hs.find_max_of_max() {
                assert!(j == 0 || j == 2);
                assert_eq!(Some((i, j)), model.best());
                hs.delete_subscriber(i).unwrap();
                model.gone[i] = true;
            }
            assert_eq!(hs.remaining_subscribers(), 0);
        }
    }
}

#[derive(Debug, Clone)]
enum Op {
    Subscriber(usize),
    Queue(usize),
}

fn ops_strategy() -> impl Strategy<Value = (usize, usize, u64, Vec<Op>)> {
    (1usize..40, 1usize..6, any::<u64>()).prop_flat_map(|(n, k, seed)| {
        let op = prop_oneof![
            8 => (0..n).prop_map(Op::Subscriber),
            1 => (0..k).prop_map(Op::Queue),
        ];
        (
            Just(n),
            Just(k),
            Just(seed),
            proptest::collection::vec(op, 0..60),
        )
    })
}

proptest! {
    #[test]
    fn random_operation_sequences((n, k, seed, ops) in ops_strategy(), tournament in any::<bool>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let cols = random_columns(&mut rng, n, k, 10);
        let sel = if tournament { RootSelector::Tournament } else { RootSelector::Scan };
        let mut hs = HeapSet::from_key_columns(cols.clone(), sel).unwrap();
        let mut model = Model::new(cols);
        assert_consistent(&hs, &model);
        for op in ops {
            match op {
                Op::Subscriber(i) => {
                    let r = hs.delete_subscriber(i);
                    prop_assert_eq!(r.is_err(), model.gone[i]);
                    model.gone[i] = true;
                }
                Op::Queue(j) => {
                    let r = hs.delete_queue(j);
                    prop_assert_eq!(r.is_err(), model.dead[j]);
                    model.dead[j] = true;
                }
            }
            assert_consistent(&hs, &model);
        }
    }
}
