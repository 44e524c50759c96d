import { ApiError, ConsoleApi } from "./api.js";
import { dispatchAction } from "./actions.js";
import type { Action, JobDoc } from "./types.js";
import {
  renderBanner,
  renderFindings,
  renderInstancesView,
  renderJobDetail,
  renderJobsView,
  renderNodesView,
} from "./views.js";

const params = new URLSearchParams(window.location.search);
const apiBase = params.get("api") ?? `http://${window.location.hostname || "127.0.0.1"}:5080`;
const pollMs = Number(params.get("poll") ?? "1000");

const api = new ConsoleApi(apiBase);
const el = (id: string): HTMLElement => document.getElementById(id)!;

let lastFindings: string[] = [];
let pendingAction = false;

async function dispatch(action: Action): Promise<void> {
  if (pendingAction) return;
  pendingAction = true;
  try {
    const result = await dispatchAction(api, action, (text) => window.confirm(text));
    if (result && result.jobIds.length > 0) {
      window.location.hash = `#job-${result.jobIds[0]}`;
      if (action.kind === "verify") {
        const findings: string[] = [];
        for (const id of result.jobIds) {
          const job = await api.waitJob(id);
          findings.push(...((job.result?.["findings"] as string[]) ?? []));
        }
        lastFindings = findings;
      }
    }
  } catch (err) {
    window.alert(err instanceof ApiError ? err.message : String(err));
  } finally {
    pendingAction = false;
    void refresh();
  }
}

function currentJobView(): number | null {
  const match = window.location.hash.match(/^#job-(\d+)$/);
  return match ? Number(match[1]) : null;
}

function wireInstanceButtons(): void {
  for (const btn of document.querySelectorAll<HTMLButtonElement>("button[data-action]")) {
    btn.onclick = () => {
      const name = btn.dataset.instance ?? "";
      const node = btn.dataset.node ?? "";
      switch (btn.dataset.action) {
        case "startup":
        case "shutdown":
        case "migrate":
          void dispatch({ kind: btn.dataset.action, instance: name });
          break;
        case "failover":
          void dispatch({
            kind: "failover",
            instance: name,
            ignoreConsistency: (el("ignore-consistency") as HTMLInputElement).checked,
          });
          break;
        case "modify-nic":
          void dispatch({
            kind: "modify_nic",
            instance: name,
            nicIndex: 0,
            link: (el("nic-link") as HTMLSelectElement).value,
          });
          break;
        case "power":
          void dispatch({
            kind: "power_toggle",
            node,
            to: btn.dataset.to === "on" ? "on" : "off",
          });
          break;
      }
    };
  }
}

function actionButtons(name: string): string {
  return (
    `<button data-action="startup" data-instance="${name}">start</button>` +
    `<button data-action="shutdown" data-instance="${name}">stop</button>` +
    `<button data-action="migrate" data-instance="${name}">migrate</button>` +
    `<button data-action="failover" data-instance="${name}">failover</button>` +
    `<button data-action="modify-nic" data-instance="${name}">re-link NIC</button>`
  );
}

async function refresh(): Promise<void> {
  try {
    const [info, nodes, instancesPage, jobs] = await Promise.all([
      api.info(),
      api.nodes().catch(() => []),
      api.instances().catch(() => ({ headers: [], rows: [], instances: [] })),
      api.jobs(),
    ]);
    el("banner").innerHTML = renderBanner(null);
    el("clock").textContent = info.when;
    el("cluster-name").textContent = info.cluster_name ?? "(cluster not initialized)";
    el("nodes").innerHTML = renderNodesView(nodes);
    el("instances").innerHTML =
      renderInstancesView(instancesPage.instances) +
      instancesPage.instances
        .map((i) => `<div class="actions">${i.name}: ${actionButtons(i.name)}</div>`)
        .join("");
    el("jobs").innerHTML = renderJobsView(jobs);
    el("findings").innerHTML = renderFindings(lastFindings);

    const lab = nodes
      .map(
        (n) =>
          `<span>${n.node} is ${n.power} ` +
          `<button data-action="power" data-node="${n.node}" data-to="${n.power === "on" ? "off" : "on"}">` +
          `power ${n.power === "on" ? "off" : "on"}</button></span>`,
      )
      .join(" ");
    el("lab-nodes").innerHTML = lab;

    const jobId = currentJobView();
    if (jobId !== null) {
      const job: JobDoc = await api.waitJob(jobId);
      el("job-detail").innerHTML = renderJobDetail(job);
    } else {
      el("job-detail").innerHTML = "";
    }
    wireInstanceButtons();
  } catch (err) {
    el("banner").innerHTML = renderBanner(
      `Cluster daemon unreachable at ${apiBase} (${err instanceof Error ? err.message : err})`,
    );
  }
}

el("verify-btn").onclick = () => void dispatch({ kind: "verify" });
el("advance-btn").onclick = () => {
  const dt = Number((el("advance-dt") as HTMLInputElement).value || "60");
  void dispatch({ kind: "advance_clock", dt });
};

void refresh();
window.setInterval(() => void refresh(), pollMs);
window.addEventListener("hashchange", () => void refresh());
