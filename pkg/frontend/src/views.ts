import type { InstanceDetail, JobDoc, LogLine, NodeRow } from "./types.js";

/** Pure projections of API payloads into HTML; no state of their own. */

const esc = (value: unknown): string =>
  String(value).replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");

export const fmtMiB = (mib: number): string =>
  mib >= 1024 ? `${(mib / 1024).toFixed(1)}G` : `${mib}M`;

const table = (headers: string[], rows: string[][], cls: string): string => {
  const head = headers.map((h) => `<th>${esc(h)}</th>`).join("");
  const body = rows
    .map((r) => `<tr>${r.map((c) => `<td>${c}</td>`).join("")}</tr>`)
    .join("");
  return `<table class="${cls}"><thead><tr>${head}</tr></thead><tbody>${body}</tbody></table>`;
};

export function renderNodesView(nodes: NodeRow[]): string {
  const rows = nodes.map((n) => [
    esc(n.name),
    `<span class="power power-${esc(n.power)}">${esc(n.power)}</span>`,
    esc(n.role),
    fmtMiB(n.dtotal),
    fmtMiB(n.dfree),
    fmtMiB(n.mtotal),
    fmtMiB(n.mnode),
    fmtMiB(n.mfree),
    String(n.pinst),
    String(n.sinst),
  ]);
  return table(
    ["Node", "Power", "Role", "DTotal", "DFree", "MTotal", "MNode", "MFree", "Pinst", "Sinst"],
    rows,
    "nodes",
  );
}

export function renderInstancesView(instances: InstanceDetail[]): string {
  const rows = instances.map((i) => [
    esc(i.name),
    esc(i.primary_node),
    esc(i.secondary_nodes.join(",")),
    `<span class="status status-${esc(i.status)}">${esc(i.status)}</span>`,
    esc(i.console),
    `:${esc(i.display)}`,
  ]);
  return table(
    ["Instance", "Primary_node", "Secondary_Nodes", "Status", "Console", "Display"],
    rows,
    "instances",
  );
}

/** The instances view reduced to the four list columns, for contract checks. */
export function instanceListRows(instances: InstanceDetail[]): string[][] {
  return instances.map((i) => [
    i.name,
    i.primary_node,
    i.secondary_nodes.join(","),
    i.status,
  ]);
}

export function renderJobsView(jobs: JobDoc[]): string {
  const rows = [...jobs].reverse().map((j) => [
    `<a href="#job-${j.id}">${j.id}</a>`,
    esc(j.summary),
    `<span class="job-status job-${esc(j.status)}">${esc(j.status)}</span>`,
    esc(j.log_tail ?? ""),
  ]);
  return table(["Job", "Op", "Status", "Last log line"], rows, "jobs");
}

export function renderLogLine(line: LogLine): string {
  const prefix = { MESSAGE: "", STEP: "* ", INFO: "- INFO: ", WARNING: "- WARNING: " }[line.level];
  return `<div class="log-line level-${esc(line.level)}">${esc(`${line.when} ${prefix}${line.text}`)}</div>`;
}

export function renderJobDetail(job: JobDoc): string {
  const lines = (job.log ?? []).map(renderLogLine).join("");
  const error =
    job.status === "error" && job.result
      ? `<p class="error">${esc(job.result["error"] ?? "failed")}</p>`
      : "";
  return (
    `<h2>Job ${job.id}: ${esc(job.summary)} ` +
    `<span class="job-status job-${esc(job.status)}">${esc(job.status)}</span></h2>` +
    `${error}<div class="log">${lines}</div>`
  );
}

export function renderFindings(findings: string[]): string {
  if (findings.length === 0) {
    return `<p class="findings-none">No findings.</p>`;
  }
  return `<ul class="findings">${findings.map((f) => `<li>${esc(f)}</li>`).join("")}</ul>`;
}

export function renderBanner(message: string | null): string {
  return message === null ? "" : `<div class="banner">${esc(message)}</div>`;
}
