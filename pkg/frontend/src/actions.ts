import type { ConsoleApi } from "./api.js";
import type { Action } from "./types.js";

/** Confirmation gate: resolves true to proceed. The app wires window.confirm
 * in; tests inject their own. */
export type ConfirmFn = (text: string) => boolean | Promise<boolean>;

/** Prompt texts mirror the command-line tool word for word. */
export const PROMPTS = {
  migrate: (name: string) =>
    `Instance ${name} will be migrated. Note that migration\n` +
    `might impact the instance if anything goes wrong (e.g. due to bugs in\n` +
    `the hypervisor). Continue?`,
  failover: (name: string) =>
    `Failover will happen to image ${name}. This requires a\n` +
    `shutdown of the instance. Continue?`,
  modify_nic: () =>
    `You are about to hot-modify a NIC. This will be done by removing the\n` +
    `existing NIC and then adding a new one. Network connection might be\n` +
    `lost. Continue?`,
  startup: (name: string) => `Start instance ${name}?`,
  shutdown: (name: string) => `Shut down instance ${name}?`,
  verify: () => `Run cluster verification?`,
  power_toggle: (node: string, to: string) => `Switch ${node} power ${to}?`,
  advance_clock: (dt: number) => `Advance the simulated clock by ${dt}s?`,
};

export interface Dispatched {
  jobIds: number[];
}

/** Confirm, POST the matching endpoint, hand back the job id(s).
 * Returns null when the operator declines; nothing is sent in that case. */
export async function dispatchAction(
  api: ConsoleApi,
  action: Action,
  confirm: ConfirmFn,
): Promise<Dispatched | null> {
  const { prompt, path, body } = planAction(action);
  if (!(await confirm(prompt))) {
    return null;
  }
  const resp = await api.post<{ job_id?: number; job_ids?: number[] }>(path, body);
  return { jobIds: resp.job_ids ?? (resp.job_id !== undefined ? [resp.job_id] : []) };
}

export function planAction(action: Action): { prompt: string; path: string; body: unknown } {
  switch (action.kind) {
    case "startup":
      return {
        prompt: PROMPTS.startup(action.instance),
        path: `/2/instances/${action.instance}/startup`,
        body: {},
      };
    case "shutdown":
      return {
        prompt: PROMPTS.shutdown(action.instance),
        path: `/2/instances/${action.instance}/shutdown`,
        body: {},
      };
    case "migrate":
      return {
        prompt: PROMPTS.migrate(action.instance),
        path: `/2/instances/${action.instance}/migrate`,
        body: {},
      };
    case "failover":
      return {
        prompt: PROMPTS.failover(action.instance),
        path: `/2/instances/${action.instance}/failover`,
        body: { ignore_consistency: action.ignoreConsistency },
      };
    case "modify_nic":
      return {
        prompt: PROMPTS.modify_nic(),
        path: `/2/instances/${action.instance}/modify`,
        body: { nic_index: action.nicIndex, link: action.link, hotplug: true },
      };
    case "verify":
      return { prompt: PROMPTS.verify(), path: `/2/cluster/verify`, body: {} };
    case "power_toggle":
      return {
        prompt: PROMPTS.power_toggle(action.node, action.to),
        path: `/2/sim/power`,
        body: { node: action.node, power: action.to },
      };
    case "advance_clock":
      return {
        prompt: PROMPTS.advance_clock(action.dt),
        path: `/2/sim/advance-clock`,
        body: { dt: action.dt },
      };
  }
}
