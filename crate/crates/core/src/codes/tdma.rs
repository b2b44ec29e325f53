use super::{message_bits_of, message_index, FeedbackCode, Message, Role, SlotEncoder};
use crate::error::{invalid, Result};
use crate::info::MacChannel;

/// Two channel uses: the first user sends its message symbol in slot 0 while
/// the second sends 0, and the other way around in slot 1. Each slot is
/// decoded by maximum likelihood, ties to the lowest symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct TdmaCode {
    bits: usize,
    in1: usize,
    in2: usize,
    out: usize,
    // Output symbol -> best symbol of the first user, then of the second.
    first: Vec<u64>,
    second: Vec<u64>,
}

impl TdmaCode {
    pub fn new(ch: &MacChannel) -> Result<Self> {
        let m = ch.in1().min(ch.in2());
        if m < 2 {
            return invalid("time-division code needs input alphabets of size at least 2");
        }
        let bits = usize::BITS as usize - 1 - m.leading_zeros() as usize;
        let size = 1usize << bits;
        let best = |p: &dyn Fn(usize, usize) -> f64, y: usize| {
            let mut best = 0;
            for a in 1..size {
                if p(y, a) > p(y, best) {
                    best = a;
                }
            }
            best as u64
        };
        let first = (0..ch.out()).map(|y| best(&|y, a| ch.prob(y, a, 0), y)).collect();
        let second = (0..ch.out()).map(|y| best(&|y, b| ch.prob(y, 0, b), y)).collect();
        Ok(TdmaCode {
            bits,
            in1: ch.in1(),
            in2: ch.in2(),
            out: ch.out(),
            first,
            second,
        })
    }
}

struct Slotted {
    symbol: usize,
    slot: usize,
}

impl SlotEncoder for Slotted {
    fn input(&mut self, past: &[usize]) -> usize {
        if past.len() == self.slot {
            self.symbol
        } else {
            0
        }
    }
}

impl FeedbackCode for TdmaCode {
    fn name(&self) -> String {
        "tdma".into()
    }

    fn block_len(&self) -> usize {
        2
    }

    fn message_bits(&self) -> usize {
        self.bits
    }

    fn input_sizes(&self) -> (usize, usize) {
        (self.in1, self.in2)
    }

    fn output_size(&self) -> usize {
        self.out
    }

    fn encoder(&self, role: Role, msg: &[bool]) -> Box<dyn SlotEncoder + '_> {
        Box::new(Slotted {
            symbol: message_index(msg) as usize,
            slot: match role {
                Role::First => 0,
                Role::Second => 1,
            },
        })
    }

    fn decode(&self, outputs: &[usize]) -> (Message, Message) {
        (
            message_bits_of(self.first[outputs[0]], self.bits),
            message_bits_of(self.second[outputs[1]], self.bits),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::simulate_code;

    #[test]
    fn noiseless_channels_decode_exactly() {
        for ch in [MacChannel::xor(), MacChannel::adder()] {
            let code = TdmaCode::new(&ch).unwrap();
            assert_eq!(code.rate_per_user(), 0.5);
            assert_eq!(simulate_code(&ch, &code, 500, 1).unwrap().errors, 0);
        }
    }
}
