import { describe, expect, it } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { jsonResponse, motherVolume } from "./fixtures.js";

function recordingClient(makeResponse: () => Response) {
  const urls: string[] = [];
  const client = new ApiClient("", (url) => {
    urls.push(url);
    return Promise.resolve(makeResponse());
  });
  return { client, urls };
}

describe("url construction", () => {
  it("encodes the scope path as a query parameter", async () => {
    const { client, urls } = recordingClient(() =>
      jsonResponse({ path: "/ATLAS", children: [], collections: [] }),
    );
    await client.scope("/ATLAS/Inner");
    expect(urls).toEqual(["/api/scopes?path=%2FATLAS%2FInner"]);
  });

  it("asks for a specific object version only when given one", async () => {
    const { client, urls } = recordingClient(() => jsonResponse(motherVolume()));
    await client.object("ATLASMotherVolume", "default");
    await client.object("ATLASMotherVolume", "default", 2);
    expect(urls).toEqual([
      "/api/objects/ATLASMotherVolume/default",
      "/api/objects/ATLASMotherVolume/default?v=2",
    ]);
  });

  it("passes folder paths through and tags as query", async () => {
    const { client, urls } = recordingClient(() =>
      jsonResponse({ folder: "mag/solenoid", tag: "HEAD", entries: [] }),
    );
    await client.entries("mag/solenoid", "prod1");
    expect(urls).toEqual(["/api/iov/mag/solenoid/entries?tag=prod1"]);
  });

  it("prefixes a base url when configured", async () => {
    const urls: string[] = [];
    const client = new ApiClient("http://localhost:8080", (url) => {
      urls.push(url);
      return Promise.resolve(jsonResponse({ classes: [] }));
    });
    await client.classes();
    expect(urls).toEqual(["http://localhost:8080/api/classes"]);
  });
});

describe("response handling", () => {
  it("unwraps list envelopes", async () => {
    const { client } = recordingClient(() =>
      jsonResponse({ classes: [{ name: "Coil", latest_dict_version: 2 }] }),
    );
    expect(await client.classes()).toEqual([
      { name: "Coil", latest_dict_version: 2 },
    ]);
  });

  it("turns error bodies into ApiError with the server code", async () => {
    const { client } = recordingClient(() =>
      jsonResponse({ error: "UnknownClass", detail: "no class 'Nope'" }, 404),
    );
    const err = await client.object("Nope", "default").catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(404);
    expect(err.code).toBe("UnknownClass");
    expect(err.message).toContain("no class 'Nope'");
  });

  it("falls back to the HTTP status for non-JSON errors", async () => {
    const { client } = recordingClient(
      () => new Response("boom", { status: 502, statusText: "Bad Gateway" }),
    );
    const err = await client.status().catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.code).toBe("HTTP502");
  });

  it("returns export documents as text", async () => {
    const doc = '<primary-numbers version="1"/>\n';
    const { client, urls } = recordingClient(() => new Response(doc, { status: 200 }));
    expect(await client.exportXml()).toBe(doc);
    expect(urls).toEqual(["/api/export/xml"]);
  });
});
