use crate::board::{Board, Mark};
use crate::neural::{Real, Tensor, ACTIONS, BOARD, INPUT_LEN, IN_PLANES};

/// Writes the encoding of `board` from `mark`'s point of view into `out`
/// (length [`INPUT_LEN`], height-width-plane order). The board sits in the
/// top-left corner; plane 0 holds `mark`'s tokens, plane 1 the opponent's
/// and plane 2 marks real board cells.
pub fn encode_into<F: Real>(board: &Board, mark: Mark, out: &mut [F]) {
    assert_eq!(out.len(), INPUT_LEN);
    out.iter_mut().for_each(|v| *v = F::zero());
    let cfg = board.config();
    for row in 0..cfg.rows() {
        for col in 0..cfg.cols() {
            let base = (row * BOARD + col) * IN_PLANES;
            out[base + 2] = F::one();
            match board.cell(row, col) {
                Some(m) if m == mark => out[base] = F::one(),
                Some(_) => out[base + 1] = F::one(),
                None => {}
            }
        }
    }
}

/// `[12, 12, 3]` tensor form of [`encode_into`].
pub fn encode_state<F: Real>(board: &Board, mark: Mark) -> Tensor<F> {
    let mut data = vec![F::zero(); INPUT_LEN];
    encode_into(board, mark, &mut data);
    Tensor::from_vec(&[BOARD, BOARD, IN_PLANES], data).expect("fixed shape")
}

/// Open columns as a 12-wide mask; columns beyond the board are closed.
pub fn legal_mask(board: &Board) -> [bool; ACTIONS] {
    let mut mask = [false; ACTIONS];
    for c in board.legal_iter() {
        mask[c] = true;
    }
    mask
}
