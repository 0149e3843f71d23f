// Typed client for the bound service JSON API. Every number the UI
// shows comes through here; nothing is computed client-side.

export interface SessionInfo {
  id: string;
  m: number;
  exactAvailable: boolean;
}

export interface BoundAnswer {
  set: string[];
  d: number;
  alpha: number;
}

export interface FamilyAnswer {
  sets: string[][];
  truncated: boolean;
}

export interface ConditionAnswer {
  surviving: string[][];
  implicated: string[];
  truncated: boolean;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly field?: string,
  ) {
    super(message);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

async function asJson(resp: Response): Promise<any> {
  const text = await resp.text();
  let body: any;
  try {
    body = JSON.parse(text);
  } catch {
    throw new ApiError(resp.status, "bad_response", `non-JSON response (status ${resp.status})`);
  }
  if (!resp.ok) {
    throw new ApiError(
      resp.status,
      typeof body.code === "string" ? body.code : "error",
      typeof body.message === "string" ? body.message : `request failed (${resp.status})`,
      typeof body.field === "string" ? body.field : undefined,
    );
  }
  return body;
}

export class Client {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  async createSession(
    labels: string[],
    pvalues: number[],
    alpha: number,
    method: string,
  ): Promise<SessionInfo> {
    const resp = await this.fetchFn(`${this.base}/api/sessions`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ labels, pvalues, alpha, method }),
    });
    const body = await asJson(resp);
    return { id: body.id, m: body.m, exactAvailable: !!body.exact_available };
  }

  async bound(id: string, labels: string[], signal?: AbortSignal): Promise<BoundAnswer> {
    const ids = encodeURIComponent(labels.join(","));
    const resp = await this.fetchFn(`${this.base}/api/sessions/${id}/bound?ids=${ids}`, { signal });
    return asJson(resp);
  }

  async defining(id: string): Promise<FamilyAnswer> {
    const body = await asJson(await this.fetchFn(`${this.base}/api/sessions/${id}/defining`));
    return { sets: body.sets, truncated: !!body.truncated };
  }

  async dual(id: string): Promise<FamilyAnswer> {
    const body = await asJson(await this.fetchFn(`${this.base}/api/sessions/${id}/dual`));
    return { sets: body.sets, truncated: !!body.truncated };
  }

  async condition(id: string, knownTrueNulls: string[]): Promise<ConditionAnswer> {
    const resp = await this.fetchFn(`${this.base}/api/sessions/${id}/condition`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ known_true_nulls: knownTrueNulls }),
    });
    return asJson(resp);
  }
}
