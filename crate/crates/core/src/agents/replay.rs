use rand::Rng;

/// Bounded FIFO of transitions with flat feature storage.
#[derive(Debug, Clone)]
pub struct ReplayBuffer {
    capacity: usize,
    width: usize,
    inserted: u64,
    states: Vec<f64>,
    next_states: Vec<f64>,
    actions: Vec<usize>,
    rewards: Vec<f64>,
    dones: Vec<bool>,
}

/// A sampled minibatch, features stacked row-major.
#[derive(Debug, Clone, Default)]
pub struct Batch {
    pub states: Vec<f64>,
    pub actions: Vec<usize>,
    pub rewards: Vec<f64>,
    pub next_states: Vec<f64>,
    pub dones: Vec<bool>,
}

impl Batch {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Experience {
    pub state_features: Vec<f64>,
    pub action: usize,
    pub reward: f64,
    pub next_features: Vec<f64>,
    pub done: bool,
}

impl ReplayBuffer {
    pub fn new(capacity: usize, width: usize) -> Self {
        assert!(capacity > 0, "replay capacity must be positive");
        Self {
            capacity,
            width,
            inserted: 0,
            states: Vec::new(),
            next_states: Vec::new(),
            actions: Vec::new(),
            rewards: Vec::new(),
            dones: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn inserted(&self) -> u64 {
        self.inserted
    }

    pub fn push(&mut self, state: &[f64], action: usize, reward: f64, next: &[f64], done: bool) {
        assert_eq!(state.len(), self.width);
        assert_eq!(next.len(), self.width);
        if self.len() < self.capacity {
            self.states.extend_from_slice(state);
            self.next_states.extend_from_slice(next);
            self.actions.push(action);
            self.rewards.push(reward);
            self.dones.push(done);
        } else {
            let slot = (self.inserted % self.capacity as u64) as usize;
            let w = self.width;
            self.states[slot * w..(slot + 1) * w].copy_from_slice(state);
            self.next_states[slot * w..(slot + 1) * w].copy_from_slice(next);
            self.actions[slot] = action;
            self.rewards[slot] = reward;
            self.dones[slot] = done;
        }
        self.inserted += 1;
    }

    pub fn push_experience(&mut self, e: &Experience) {
        self.push(&e.state_features, e.action, e.reward, &e.next_features, e.done);
    }

    /// Stored transitions from oldest to newest.
    pub fn iter(&self) -> impl Iterator<Item = Experience> + '_ {
        let n = self.len();
        let start = if n < self.capacity {
            0
        } else {
            (self.inserted % self.capacity as u64) as usize
        };
        (0..n).map(move |k| self.get((start + k) % n))
    }

    pub fn get(&self, i: usize) -> Experience {
        let w = self.width;
        Experience {
            state_features: self.states[i * w..(i + 1) * w].to_vec(),
            action: self.actions[i],
            reward: self.rewards[i],
            next_features: self.next_states[i * w..(i + 1) * w].to_vec(),
            done: self.dones[i],
        }
    }

    /// Uniform sample of `size` distinct transitions.
    pub fn sample<R: Rng + ?Sized>(&self, size: usize, rng: &mut R) -> Batch {
        assert!(size <= self.len(), "batch larger than buffer");
        let w = self.width;
        let mut b = Batch {
            states: Vec::with_capacity(size * w),
            actions: Vec::with_capacity(size),
            rewards: Vec::with_capacity(size),
            next_states: Vec::with_capacity(size * w),
            dones: Vec::with_capacity(size),
        };
        for i in rand::seq::index::sample(rng, self.len(), size) {
            b.states.extend_from_slice(&self.states[i * w..(i + 1) * w]);
            b.next_states.extend_from_slice(&self.next_states[i * w..(i + 1) * w]);
            b.actions.push(self.actions[i]);
            b.rewards.push(self.rewards[i]);
            b.dones.push(self.dones[i]);
        }
        b
    }
}
