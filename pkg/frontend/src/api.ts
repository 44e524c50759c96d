import type { ClusterInfo, InstancesPage, JobDoc, NodeRow } from "./types.js";

export class ApiError extends Error {
  status: number;
  code: string;

  constructor(status: number, message: string, code = "") {
    super(message);
    this.status = status;
    this.code = code;
  }
}

/** Typed client for the daemon's /2 endpoints; 4xx texts pass through verbatim. */
export class ConsoleApi {
  constructor(readonly baseUrl: string) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await fetch(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? {} : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = (await resp.json()) as Record<string, unknown>;
    if (!resp.ok) {
      throw new ApiError(resp.status, String(payload.error ?? `HTTP ${resp.status}`),
        String(payload.code ?? ""));
    }
    return payload as T;
  }

  get<T>(path: string): Promise<T> {
    return this.request<T>("GET", path);
  }

  post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>("POST", path, body);
  }

  info(): Promise<ClusterInfo> {
    return this.get("/2/info");
  }

  nodes(): Promise<NodeRow[]> {
    return this.get<{ nodes: NodeRow[] }>("/2/nodes").then((d) => d.nodes);
  }

  instances(): Promise<InstancesPage> {
    return this.get("/2/instances");
  }

  osNames(): Promise<string[]> {
    return this.get<{ names: string[] }>("/2/os").then((d) => d.names);
  }

  jobs(): Promise<JobDoc[]> {
    return this.get<{ jobs: JobDoc[] }>("/2/jobs").then((d) => d.jobs);
  }

  job(id: number): Promise<JobDoc> {
    return this.get(`/2/jobs/${id}`);
  }

  /** Long-poll form: resolves once the job is terminal. */
  waitJob(id: number): Promise<JobDoc> {
    return this.get(`/2/jobs/${id}/wait`);
  }
}
