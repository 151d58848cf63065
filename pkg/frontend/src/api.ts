/** Typed client for the judging service's HTTP/JSON API.
 *
 * This is the only module that talks to the server; everything else
 * consumes the types it returns. The server never includes document
 * provenance in any payload, and neither does anything here.
 */

export interface TopicSummary {
  topic_id: string;
  title: string;
  levels: Record<string, string>;
  judged: number;
  total: number;
}

export interface TopicList {
  assessor_id: string;
  topics: TopicSummary[];
}

export interface PoolView {
  topic_id: string;
  doc_ids: string[];
  grades: Record<string, number>;
}

export interface JudgmentAck {
  ok: boolean;
  topic_id: string;
  doc_id: string;
  grade: number;
  judged: number;
  total: number;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    detail: string,
  ) {
    super(`${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function errorDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: string };
    if (typeof body.detail === "string") return body.detail;
  } catch {
    // fall through to the status text
  }
  return response.statusText || "request failed";
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly token: string,
  ) {}

  private headers(extra: Record<string, string> = {}): Record<string, string> {
    return { authorization: `Bearer ${this.token}`, ...extra };
  }

  private async checked(response: Response): Promise<Response> {
    if (!response.ok) {
      throw new ApiError(response.status, await errorDetail(response));
    }
    return response;
  }

  async topics(): Promise<TopicList> {
    const response = await this.checked(
      await fetch(`${this.baseUrl}/api/topics`, { headers: this.headers() }),
    );
    return (await response.json()) as TopicList;
  }

  async pool(topicId: string): Promise<PoolView> {
    const response = await this.checked(
      await fetch(`${this.baseUrl}/api/pools/${encodeURIComponent(topicId)}`, {
        headers: this.headers(),
      }),
    );
    return (await response.json()) as PoolView;
  }

  async docHtml(docId: string): Promise<string> {
    const response = await this.checked(
      await fetch(
        `${this.baseUrl}/api/docs/${encodeURIComponent(docId)}/clean`,
        { headers: this.headers() },
      ),
    );
    return await response.text();
  }

  async judge(
    topicId: string,
    docId: string,
    grade: number,
  ): Promise<JudgmentAck> {
    const response = await this.checked(
      await fetch(`${this.baseUrl}/api/judgments`, {
        method: "POST",
        headers: this.headers({ "content-type": "application/json" }),
        body: JSON.stringify({ topic_id: topicId, doc_id: docId, grade }),
      }),
    );
    return (await response.json()) as JudgmentAck;
  }

  exportUrl(assessorId?: string): string {
    const base = `${this.baseUrl}/api/export/qrels`;
    return assessorId === undefined
      ? base
      : `${base}?assessor=${encodeURIComponent(assessorId)}`;
  }

  async exportQrels(assessorId?: string): Promise<string> {
    const response = await this.checked(
      await fetch(this.exportUrl(assessorId), { headers: this.headers() }),
    );
    return await response.text();
  }
}
