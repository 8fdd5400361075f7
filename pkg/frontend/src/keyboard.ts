// Keyboard shortcut mapping; review is keyboard-first.

export type KeyCommand =
  | { kind: "accept" }
  | { kind: "flag" }
  | { kind: "picker" }
  | { kind: "next" }
  | { kind: "prev" }
  | { kind: "close" }
  | { kind: "alternative"; index: number };

export function commandFor(key: string): KeyCommand | null {
  switch (key) {
    case "a":
      return { kind: "accept" };
    case "f":
      return { kind: "flag" };
    case "c":
      return { kind: "picker" };
    case "j":
    case "ArrowRight":
    case "ArrowDown":
      return { kind: "next" };
    case "k":
    case "ArrowLeft":
    case "ArrowUp":
      return { kind: "prev" };
    case "Escape":
      return { kind: "close" };
    default:
      if (/^[1-9]$/.test(key)) return { kind: "alternative", index: Number(key) - 1 };
      return null;
  }
}
