import { describe, expect, it } from "vitest";
import {
  addAnnotation, adoptableRoots, AnnotationError, DERIVE, freshId,
  removeAnnotation, rootIds, spanStructure,
} from "../src/model.js";
import type { AnnotationData, DocumentData } from "../src/types.js";

const BODY = "if an adult smokes near a child then a fine applies.";
//            0123456789...                                     len 52

function doc(kind: "legislation" | "query" = "query",
             annotations: AnnotationData[] = []): DocumentData {
  return { id: "d", title: "D", body: BODY, kind, annotations };
}

function term(id: string, span: [number, number], name: string,
              args: string[] = []): AnnotationData {
  return { id, span, kind: "term", name, args };
}

function comp(id: string, span: [number, number], connective: AnnotationData["connective"],
              children?: string[]): AnnotationData {
  const a: AnnotationData = { id, span, kind: "composite", connective };
  if (children) a.children = children;
  return a;
}

describe("addAnnotation", () => {
  it("derives the smallest containing composite as parent", () => {
    let d = doc();
    d = addAnnotation(d, comp("big", [0, 52], "And"));
    d = addAnnotation(d, comp("small", [0, 20], "Ob"), "big");
    d = addAnnotation(d, term("t", [6, 11], "adult"));
    const small = d.annotations.find(a => a.id === "small")!;
    expect(small.children).toEqual(["t"]);
  });

  it("keeps terms as leaves", () => {
    let d = doc();
    d = addAnnotation(d, term("t", [6, 11], "adult"));
    expect(() => addAnnotation(d, { ...term("u", [0, 20], "x"), children: ["t"] }))
      .toThrow(AnnotationError);
    expect(() => addAnnotation(d, term("u", [6, 8], "x"), "t")).toThrow(AnnotationError);
  });

  it("rejects overlapping siblings and leaves the document unchanged", () => {
    let d = doc();
    d = addAnnotation(d, comp("c", [0, 52], "And"));
    d = addAnnotation(d, term("t1", [6, 11], "adult"));
    const before = spanStructure(d);
    expect(() => addAnnotation(d, term("t2", [8, 18], "smokes")))
      .toThrow(/sibling/);
    expect(spanStructure(d)).toBe(before);
  });

  it("rejects a second goal", () => {
    let d = doc("query");
    d = addAnnotation(d, { id: "g1", span: [0, 52], kind: "goal" });
    expect(() => addAnnotation(d, { id: "g2", span: [0, 20], kind: "goal" }, null))
      .toThrow(/already has a goal/);
  });

  it("rejects goals outside query documents", () => {
    const d = doc("legislation");
    expect(() => addAnnotation(d, { id: "g", span: [0, 52], kind: "goal" }))
      .toThrow(/query documents/);
  });

  it("rejects a goal that would not be a root", () => {
    let d = doc("query");
    d = addAnnotation(d, comp("c", [0, 52], "And"));
    expect(() => addAnnotation(d, { id: "g", span: [0, 20], kind: "goal" }, "c"))
      .toThrow(/root/);
  });

  it("adopts child roots and sorts them by span", () => {
    let d = doc();
    d = addAnnotation(d, term("late", [39, 43], "fine"));
    d = addAnnotation(d, term("early", [6, 11], "adult"));
    d = addAnnotation(d, comp("c", [0, 52], "CondOb", ["late", "early"]));
    const c = d.annotations.find(a => a.id === "c")!;
    expect(c.children).toEqual(["early", "late"]);
    expect(rootIds(d)).toEqual(["c"]);
  });

  it("refuses to adopt a non-root", () => {
    let d = doc();
    d = addAnnotation(d, comp("outer", [0, 52], "And"));
    d = addAnnotation(d, term("t", [6, 11], "adult"));     // child of outer
    expect(() => addAnnotation(d, comp("c", [0, 20], "Ob", ["t"]), null))
      .toThrow(/not a root/);
  });

  it("refuses overlapping adopted children", () => {
    let d = doc();
    d = addAnnotation(d, term("a", [6, 11], "adult"));
    d = addAnnotation(d, comp("b", [8, 18], "Not"));        // separate root, overlaps a
    expect(() => addAnnotation(d, comp("c", [0, 52], "And", ["a", "b"])))
      .toThrow(/overlap/);
  });

  it("refuses children that escape the new span", () => {
    let d = doc();
    d = addAnnotation(d, term("a", [39, 43], "fine"));
    expect(() => addAnnotation(d, comp("c", [0, 20], "Ob", ["a"])))
      .toThrow(/outside/);
  });

  it("rejects spans outside the body and ids already used", () => {
    let d = doc();
    expect(() => addAnnotation(d, term("t", [0, 53], "x"))).toThrow(/bounds/);
    expect(() => addAnnotation(d, term("t", [5, 5], "x"))).toThrow(/bounds/);
    d = addAnnotation(d, term("t", [6, 11], "adult"));
    expect(() => addAnnotation(d, term("t", [12, 18], "smokes"))).toThrow(/already used/);
  });

  it("slots below an equal-span chain when strictly inner", () => {
    let d = doc("query");
    d = addAnnotation(d, { id: "g", span: [0, 52], kind: "goal" });
    d = addAnnotation(d, comp("c", [0, 52], "CondOb"), "g");
    // Implies outranks both chain members on the inside, so DERIVE
    // attaches it under the innermost one
    d = addAnnotation(d, comp("i", [0, 52], "Implies"), DERIVE);
    const c = d.annotations.find(a => a.id === "c")!;
    expect(c.children).toEqual(["i"]);
  });

  it("refuses an equal span that cannot nest uniquely", () => {
    let d = doc("query");
    d = addAnnotation(d, { id: "g", span: [0, 52], kind: "goal" });
    d = addAnnotation(d, comp("c", [0, 52], "CondOb"), "g");
    expect(() => addAnnotation(d, comp("c2", [0, 52], "CondPm")))
      .toThrow(/nesting order/);
  });

  it("lets adoption bypass the equal-span rank check", () => {
    // a goal over the full span cannot slot below the CondOb it matches,
    // but adopting the CondOb makes it the new root above it
    let d = doc("query");
    d = addAnnotation(d, comp("c", [0, 52], "CondOb"));
    expect(() => addAnnotation(d, { id: "g", span: [0, 52], kind: "goal" }))
      .toThrow(AnnotationError);
    d = addAnnotation(d, { id: "g", span: [0, 52], kind: "goal", children: ["c"] });
    expect(rootIds(d)).toEqual(["g"]);
  });

  it("allows overlapping roots for alternative readings", () => {
    let d = doc();
    d = addAnnotation(d, comp("r1", [0, 40], "And"), null);
    d = addAnnotation(d, comp("r2", [6, 52], "Or"), null);
    expect(rootIds(d).sort()).toEqual(["r1", "r2"]);
  });
});

describe("removeAnnotation", () => {
  it("removes the whole subtree and detaches from the parent", () => {
    let d = doc();
    d = addAnnotation(d, term("a", [6, 11], "adult"));
    d = addAnnotation(d, term("f", [39, 43], "fine"));
    d = addAnnotation(d, comp("n", [0, 20], "Not", ["a"]));
    d = addAnnotation(d, comp("c", [0, 52], "CondOb", ["n", "f"]));
    d = removeAnnotation(d, "n");
    expect(d.annotations.map(x => x.id).sort()).toEqual(["c", "f"]);
    const c = d.annotations.find(a => a.id === "c")!;
    expect(c.children).toEqual(["f"]);
  });

  it("drops the children key when the last child goes", () => {
    let d = doc();
    d = addAnnotation(d, term("a", [6, 11], "adult"));
    d = addAnnotation(d, comp("n", [0, 20], "Not", ["a"]));
    d = removeAnnotation(d, "a");
    const n = d.annotations.find(x => x.id === "n")!;
    expect("children" in n).toBe(false);
  });

  it("errors on unknown ids", () => {
    expect(() => removeAnnotation(doc(), "nope")).toThrow(/does not exist/);
  });
});

describe("helpers", () => {
  it("freshId fills the first gap deterministically", () => {
    let d = doc();
    expect(freshId(d, "a")).toBe("a1");
    d = addAnnotation(d, term("a1", [6, 11], "adult"));
    d = addAnnotation(d, term("a3", [12, 18], "smokes"));
    expect(freshId(d, "a")).toBe("a2");
  });

  it("adoptableRoots returns the roots inside the range, span-sorted", () => {
    let d = doc();
    d = addAnnotation(d, term("b", [12, 18], "smokes"));
    d = addAnnotation(d, term("a", [6, 11], "adult"));
    d = addAnnotation(d, term("c", [39, 43], "fine"));
    expect(adoptableRoots(d, [0, 20])).toEqual(["a", "b"]);
    expect(adoptableRoots(d, [0, 52])).toEqual(["a", "b", "c"]);
    expect(adoptableRoots(d, [40, 52])).toEqual([]);
  });

  it("spanStructure ignores insertion order", () => {
    let d1 = doc();
    d1 = addAnnotation(d1, term("a", [6, 11], "adult"));
    d1 = addAnnotation(d1, term("b", [12, 18], "smokes"));
    let d2 = doc();
    d2 = addAnnotation(d2, term("b", [12, 18], "smokes"));
    d2 = addAnnotation(d2, term("a", [6, 11], "adult"));
    expect(spanStructure(d1)).toBe(spanStructure(d2));
  });
});
