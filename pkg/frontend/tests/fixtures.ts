import type { Param, StoredObject } from "../src/types.js";

/** The well-known sample collection, exactly as GET /api/objects returns it. */
export function motherVolume(): StoredObject {
  return {
    class: "ATLASMotherVolume",
    instance: "default",
    scope: "/ATLAS",
    dict_version: 1,
    object_version: 1,
    params: [
      {
        name: "Version",
        type: "int",
        value: "2",
        unit: null,
        comment: "2001 VERSION WITH ENDCAP SHIFTED B",
      },
      { name: "Rmin", type: "float", value: "0.0", unit: "mm", comment: "Inner Radius" },
      { name: "Rmax", type: "float", value: "1400.0", unit: "mm", comment: "Outer Radius" },
      { name: "Zmax", type: "float", value: "2350.0", unit: "mm", comment: "Maximum Z" },
    ],
  };
}

/** A second object version differing from motherVolume() in exactly one
 * field value (Rmax). */
export function motherVolumeEdited(): StoredObject {
  const obj = motherVolume();
  obj.object_version = 2;
  obj.params = obj.params.map((p: Param) =>
    p.name === "Rmax" ? { ...p, value: "1425.0" } : p,
  );
  return obj;
}

export function jsonResponse(body: unknown, status = 200): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  });
}
