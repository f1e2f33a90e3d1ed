// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { renderObjectTable, renderScope } from "../src/render.js";
import type { Scope } from "../src/types.js";
import { motherVolume } from "./fixtures.js";

function container(): HTMLElement {
  const node = document.createElement("div");
  document.body.appendChild(node);
  return node;
}

describe("scope browser", () => {
  it("lists child scopes and collections, navigating on click", () => {
    const scope: Scope = {
      path: "/ATLAS",
      children: ["/ATLAS/Inner", "/ATLAS/Muon"],
      collections: [{ class: "ATLASMotherVolume", instance: "default" }],
    };
    const host = container();
    const visited: string[] = [];
    const opened: string[] = [];
    renderScope(host, scope, {
      onScope: (path) => visited.push(path),
      onCollection: (cls, instance) => opened.push(`${cls}/${instance}`),
    });

    expect(host.querySelector(".scope-path")?.textContent).toBe("/ATLAS");
    const childLinks = [...host.querySelectorAll(".scope-link")];
    expect(childLinks.map((a) => a.textContent)).toEqual([
      "/ATLAS/Inner",
      "/ATLAS/Muon",
    ]);
    (childLinks[1] as HTMLAnchorElement).click();
    expect(visited).toEqual(["/ATLAS/Muon"]);

    const colLink = host.querySelector(".collection-link") as HTMLAnchorElement;
    expect(colLink.textContent).toBe("ATLASMotherVolume/default");
    colLink.click();
    expect(opened).toEqual(["ATLASMotherVolume/default"]);
  });

  it("renders the mother-volume collection with all five columns", () => {
    const host = container();
    renderObjectTable(host, motherVolume());

    const headers = [...host.querySelectorAll("thead th")].map(
      (th) => th.textContent,
    );
    expect(headers).toEqual(["Name", "Type", "Value", "Unit", "Comment"]);

    const rows = [...host.querySelectorAll("tbody tr.param")].map((tr) =>
      [...tr.querySelectorAll("td")].map((td) => td.textContent),
    );
    expect(rows).toEqual([
      ["Version", "int", "2", "", "2001 VERSION WITH ENDCAP SHIFTED B"],
      ["Rmin", "float", "0.0", "mm", "Inner Radius"],
      ["Rmax", "float", "1400.0", "mm", "Outer Radius"],
      ["Zmax", "float", "2350.0", "mm", "Maximum Z"],
    ]);

    expect(host.querySelector(".object-head")?.textContent).toBe(
      "ATLASMotherVolume/default @ /ATLAS (dict v1, object v1)",
    );
  });
});
