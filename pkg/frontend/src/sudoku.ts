/**
 * Sudoku grid model and DOM view. Givens arrive as an 81-character string
 * (row major, '0' for blanks); they render locked while blanks accept a
 * single digit 1-9. Submission is enabled only once the grid is full.
 */

export interface SudokuCell {
  value: number; // 0 = blank
  given: boolean;
}

export function parsePuzzle(payload: string): SudokuCell[] {
  if (!/^[0-9]{81}$/.test(payload)) {
    throw new Error("puzzle payload must be 81 digits");
  }
  return [...payload].map((ch) => {
    const value = Number(ch);
    return { value, given: value !== 0 };
  });
}

export function gridText(cells: readonly SudokuCell[]): string {
  return cells.map((c) => String(c.value)).join("");
}

export function isComplete(cells: readonly SudokuCell[]): boolean {
  return cells.every((c) => c.value >= 1 && c.value <= 9);
}

export interface SudokuView {
  readonly element: HTMLElement;
  readonly cells: SudokuCell[];
  /** Programmatic entry used by tests and keyboard handlers. */
  setCell(index: number, value: number): void;
  submit(): void;
}

export function renderSudoku(
  doc: Document,
  payload: string,
  onSubmit: (solution: string) => void,
): SudokuView {
  const cells = parsePuzzle(payload);
  const wrapper = doc.createElement("div");
  wrapper.className = "sudoku";
  const table = doc.createElement("table");
  table.className = "sudoku-grid";
  const inputs: HTMLInputElement[] = [];

  for (let r = 0; r < 9; r++) {
    const tr = doc.createElement("tr");
    for (let c = 0; c < 9; c++) {
      const index = r * 9 + c;
      const cell = cells[index]!;
      const td = doc.createElement("td");
      const input = doc.createElement("input");
      input.type = "text";
      input.maxLength = 1;
      input.dataset.index = String(index);
      if (cell.given) {
        input.value = String(cell.value);
        input.readOnly = true;
        input.disabled = true;
        input.className = "given";
      } else {
        input.className = "blank";
        input.addEventListener("input", () => {
          // anything but a single digit 1-9 is rejected outright
          const ch = input.value.slice(-1);
          if (/^[1-9]$/.test(ch)) {
            input.value = ch;
            cell.value = Number(ch);
          } else {
            input.value = "";
            cell.value = 0;
          }
          refresh();
        });
      }
      inputs.push(input);
      td.appendChild(input);
      tr.appendChild(td);
    }
    table.appendChild(tr);
  }

  const button = doc.createElement("button");
  button.textContent = "Submit solution";
  button.className = "sudoku-submit";
  button.disabled = true;
  button.addEventListener("click", () => {
    if (isComplete(cells)) {
      onSubmit(gridText(cells));
    }
  });

  const refresh = () => {
    button.disabled = !isComplete(cells);
  };

  wrapper.appendChild(table);
  wrapper.appendChild(button);

  return {
    element: wrapper,
    cells,
    setCell(index: number, value: number) {
      const cell = cells[index];
      if (cell === undefined || cell.given) {
        return;
      }
      if (!Number.isInteger(value) || value < 0 || value > 9) {
        return;
      }
      cell.value = value;
      inputs[index]!.value = value === 0 ? "" : String(value);
      refresh();
    },
    submit() {
      button.click();
    },
  };
}
