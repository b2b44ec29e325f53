use super::{message_bits_of, message_index, FeedbackCode, Message, Role, SlotEncoder};
use crate::error::{invalid, Result};
use crate::info::MacChannel;

/// One channel use, each user sending its message as the input symbol.
/// The decoder is maximum likelihood with ties to the lowest index.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityCode {
    bits: usize,
    in1: usize,
    in2: usize,
    out: usize,
    // Output symbol -> (m1, m2).
    table: Vec<(u64, u64)>,
}

impl IdentityCode {
    pub fn new(ch: &MacChannel) -> Result<Self> {
        let m = ch.in1().min(ch.in2());
        if m < 2 {
            return invalid("identity code needs input alphabets of size at least 2");
        }
        let bits = usize::BITS as usize - 1 - m.leading_zeros() as usize;
        let size = 1usize << bits;
        let table = (0..ch.out())
            .map(|y| {
                let mut best = (0u64, 0u64);
                let mut best_p = -1.0;
                for a in 0..size {
                    for b in 0..size {
                        let p = ch.prob(y, a, b);
                        if p > best_p {
                            best_p = p;
                            best = (a as u64, b as u64);
                        }
                    }
                }
                best
            })
            .collect();
        Ok(IdentityCode {
            bits,
            in1: ch.in1(),
            in2: ch.in2(),
            out: ch.out(),
            table,
        })
    }
}

struct Fixed(usize);

impl SlotEncoder for Fixed {
    fn input(&mut self, _past: &[usize]) -> usize {
        self.0
    }
}

impl FeedbackCode for IdentityCode {
    fn name(&self) -> String {
        "identity".into()
    }

    fn block_len(&self) -> usize {
        1
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

    fn encoder(&self, _role: Role, msg: &[bool]) -> Box<dyn SlotEncoder + '_> {
        Box::new(Fixed(message_index(msg) as usize))
    }

    fn decode(&self, outputs: &[usize]) -> (Message, Message) {
        let (a, b) = self.table[outputs[0]];
        (message_bits_of(a, self.bits), message_bits_of(b, self.bits))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::simulate_code;

    #[test]
    fn identity_on_named_channels() {
        let xor = MacChannel::xor();
        let code = IdentityCode::new(&xor).unwrap();
        // XOR output 0 decodes to (0, 0), output 1 to (0, 1).
        assert_eq!(code.decode(&[1]), (vec![false], vec![true]));
        let est = simulate_code(&xor, &code, 4000, 3).unwrap();
        assert!((est.error_prob - 0.5).abs() < 0.05, "{est:?}");

        let adder = MacChannel::adder();
        let est = simulate_code(&adder, &IdentityCode::new(&adder).unwrap(), 4000, 3).unwrap();
        assert!((est.error_prob - 0.25).abs() < 0.05, "{est:?}");
    }
}
