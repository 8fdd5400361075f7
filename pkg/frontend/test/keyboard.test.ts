import { describe, expect, it } from "vitest";

import { commandFor } from "../src/keyboard.js";

describe("commandFor", () => {
  it("maps the review shortcuts", () => {
    expect(commandFor("a")).toEqual({ kind: "accept" });
    expect(commandFor("f")).toEqual({ kind: "flag" });
    expect(commandFor("c")).toEqual({ kind: "picker" });
    expect(commandFor("Escape")).toEqual({ kind: "close" });
  });

  it("maps navigation both vim-style and with arrows", () => {
    expect(commandFor("j")).toEqual({ kind: "next" });
    expect(commandFor("ArrowRight")).toEqual({ kind: "next" });
    expect(commandFor("ArrowDown")).toEqual({ kind: "next" });
    expect(commandFor("k")).toEqual({ kind: "prev" });
    expect(commandFor("ArrowLeft")).toEqual({ kind: "prev" });
    expect(commandFor("ArrowUp")).toEqual({ kind: "prev" });
  });

  it("maps digits to alternatives", () => {
    expect(commandFor("1")).toEqual({ kind: "alternative", index: 0 });
    expect(commandFor("5")).toEqual({ kind: "alternative", index: 4 });
    expect(commandFor("0")).toBeNull();
  });

  it("ignores unmapped keys", () => {
    expect(commandFor("x")).toBeNull();
    expect(commandFor("Enter")).toBeNull();
  });
});
