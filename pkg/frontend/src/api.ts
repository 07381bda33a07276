/** Typed client for the annotation service's JSON API. */

export type Stage = "LINKS" | "NOUN_PHRASES" | "MANUAL";

export interface TaskView {
  entity_id: number;
  entity_name: string;
  first_paragraph: string;
  stage: Stage;
  labels: string[];
}

export interface Breakdown {
  LINKS: number;
  NOUN_PHRASES: number;
  MANUAL: number;
  total: number;
}

export interface StatsView {
  breakdown: Breakdown;
  skipped: number;
  first_link_agreement: number | null;
}

export interface AnnotateResult {
  weight: number;
  source: Stage;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    message: string
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(response: Response): Promise<ApiError> {
  let detail = response.statusText || `HTTP ${response.status}`;
  try {
    const body = (await response.json()) as { detail?: string };
    if (body && typeof body.detail === "string") detail = body.detail;
  } catch {
    // keep the status text
  }
  return new ApiError(response.status, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private token: string | null = null
  ) {}

  hasToken(): boolean {
    return this.token !== null;
  }

  setToken(token: string | null): void {
    this.token = token;
  }

  private async request(path: string, init: RequestInit = {}): Promise<Response> {
    const headers = new Headers(init.headers);
    if (this.token) headers.set("Authorization", `Bearer ${this.token}`);
    const response = await fetch(this.baseUrl + path, { ...init, headers });
    if (!response.ok) throw await parseError(response);
    return response;
  }

  private async post(path: string, body?: unknown): Promise<Response> {
    return this.request(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: body === undefined ? null : JSON.stringify(body),
    });
  }

  /** Exchange a registered annotator name for the bearer token. */
  async login(name: string): Promise<string> {
    const response = await this.post("/api/session", { name });
    const body = (await response.json()) as { token: string };
    this.token = body.token;
    return body.token;
  }

  /** The current task, or null when every entity is done (204). */
  async task(): Promise<TaskView | null> {
    const response = await this.request("/api/task");
    if (response.status === 204) return null;
    return (await response.json()) as TaskView;
  }

  /** "Not in this list": advance to the next stage of the task. */
  async reject(entityId: number): Promise<TaskView> {
    const response = await this.post(`/api/task/${entityId}/reject`);
    return (await response.json()) as TaskView;
  }

  async annotate(
    entityId: number,
    labelText: string,
    selectionIndex?: number
  ): Promise<AnnotateResult> {
    const body: { label_text: string; selection_index?: number } = {
      label_text: labelText,
    };
    if (selectionIndex !== undefined) body.selection_index = selectionIndex;
    const response = await this.post(`/api/task/${entityId}/annotate`, body);
    return (await response.json()) as AnnotateResult;
  }

  async skip(entityId: number): Promise<void> {
    await this.post(`/api/task/${entityId}/skip`);
  }

  async stats(): Promise<StatsView> {
    const response = await this.request("/api/stats");
    return (await response.json()) as StatsView;
  }
}
