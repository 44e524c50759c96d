/** Payload shapes served by the cluster daemon's /2 API. */

export interface ClusterInfo {
  initialized: boolean;
  now: number;
  when: string;
  cluster_name?: string;
  master_node?: string;
  config_serial?: number;
}

export interface NodeRow {
  name: string;
  node: string;
  offline: boolean;
  power: string;
  role: string;
  dtotal: number;
  dfree: number;
  mtotal: number;
  mnode: number;
  mfree: number;
  pinst: number;
  sinst: number;
}

export interface InstanceDetail {
  name: string;
  primary_node: string;
  secondary_nodes: string[];
  status: string;
  admin_state: string;
  actual_state: string;
  os: string;
  disk_template: string;
  network_port: number;
  console: string;
  display: number;
}

export interface InstancesPage {
  headers: string[];
  rows: string[][];
  instances: InstanceDetail[];
}

export interface LogLine {
  t: number;
  when: string;
  level: "MESSAGE" | "STEP" | "INFO" | "WARNING";
  text: string;
}

export interface JobDoc {
  id: number;
  op: string;
  summary: string;
  status: "queued" | "running" | "success" | "error";
  result: Record<string, unknown> | null;
  log?: LogLine[];
  log_tail?: string;
}

export type Action =
  | { kind: "startup"; instance: string }
  | { kind: "shutdown"; instance: string }
  | { kind: "migrate"; instance: string }
  | { kind: "failover"; instance: string; ignoreConsistency: boolean }
  | { kind: "modify_nic"; instance: string; nicIndex: number; link: string }
  | { kind: "verify" }
  | { kind: "power_toggle"; node: string; to: "on" | "off" }
  | { kind: "advance_clock"; dt: number };
