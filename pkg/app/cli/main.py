"""
makespan-lab 命令行入口

用法:
    python -m app.cli compare --workload app/fixtures/table1.json
    python -m app.cli simulate --workload app/fixtures/table1.json --policy mkjr --out gantt.csv
    python -m app.cli gen --seed 1 --n 5 --out w.json

环境变量:
    MAKESPAN_LAB_THREADS    搜索与扫描的最大并行进程数（默认 1）
    LOG_LEVEL / LOG_FORMAT  日志级别与控制台日志格式（日志写到 stderr）
"""

import argparse
import sys
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, TextIO, Tuple

from app.cli.generator import generate_workload
from app.config.settings import settings
from app.core.exceptions import LabException, ParameterException, get_exit_code
from app.core.logging import cli_logger, log_error_with_context, setup_logging
from app.schemas.common import DurationModel
from app.schemas.report import rational_doc, sweep_documents
from app.schemas.workload import ClusterConfig, Workload
from app.services.johnson import durations_of
from app.services.oracle import (
    brute_force_best_order,
    budget_sweep,
    compare_report,
    ratio_sweep,
    stability_check,
)
from app.services.schedulers import (
    Schedule,
    mk_jr_schedule,
    pinned_or_searched_pools,
    uaas_schedule,
)
from app.services.simulator import gantt_csv_text, simulate_verified
from app.services.workload_model import validate_workload
from app.utils.rational_utils import parse_rational
from app.utils.workload_io import dump_workload, dumps_document, load_workload, write_text

COMMANDS = ('schedule', 'simulate', 'compare', 'sweep-ratio', 'oracle', 'gen', 'stability')
POLICIES = ('uaas', 'mkjr', 'pools')


@dataclass
class RunConfig:
    """一次命令行运行的全部参数"""
    command: str
    workload_path: Optional[str] = None
    output_path: Optional[str] = None
    policy: str = 'uaas'
    seed: int = 0
    n: int = 5
    duration_range: Tuple[str, str] = ('1', '10')
    demand_range: Tuple[int, int] = (1, 10)
    cluster: Tuple[int, int] = (10, 10)
    total_slots: Optional[int] = None
    budgets: List[int] = field(default_factory=list)
    scale: List[str] = field(default_factory=list)
    nodes: Optional[Tuple[int, int]] = None
    wave: bool = False

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise ParameterException(f"未知命令: {self.command}", field="command", value=self.command)
        if self.policy not in POLICIES:
            raise ParameterException(f"未知策略: {self.policy}", field="policy", value=self.policy)
        if self.command != 'gen' and not self.workload_path:
            raise ParameterException(f"{self.command} 需要 --workload", field="workload")


def build_schedule(w: Workload, policy: str) -> Schedule:
    if policy == 'mkjr':
        return mk_jr_schedule(w)
    if policy == 'pools':
        return pinned_or_searched_pools(w)
    return uaas_schedule(w)


def schedule_document(schedule: Schedule) -> Dict[str, Any]:
    pools = []
    for pool in schedule.pools:
        pools.append({
            'cluster': pool.cluster.label(),
            'order': list(pool.job_ids),
            'jobs': [
                {
                    'id': job.id,
                    'alloc_map': job.alloc_map,
                    'alloc_reduce': job.alloc_reduce,
                    'map_duration': rational_doc(job.eff_map_duration),
                    'reduce_duration': rational_doc(job.eff_reduce_duration),
                }
                for job in pool.jobs
            ],
            'predicted_makespan': rational_doc(pool.predicted_makespan),
        })
    doc = {
        'policy': schedule.policy.value,
        'order': schedule.order,
        'predicted_makespan': rational_doc(schedule.predicted_makespan),
        'pools': pools,
    }
    if schedule.pools_source:
        doc['pools_source'] = schedule.pools_source
    return doc


def _emit(text: str, config: RunConfig, stdout: TextIO) -> None:
    if config.output_path:
        write_text(text, config.output_path)
        cli_logger.info(f"已写出 {config.output_path}")
    else:
        stdout.write(text)


def _load(config: RunConfig) -> Workload:
    return validate_workload(load_workload(config.workload_path))


def _cmd_schedule(config: RunConfig, stdout: TextIO) -> None:
    schedule = build_schedule(_load(config), config.policy)
    _emit(dumps_document(schedule_document(schedule)), config, stdout)


def _cmd_simulate(config: RunConfig, stdout: TextIO) -> None:
    w = _load(config)
    schedule = build_schedule(w, config.policy)
    model = DurationModel.WAVE if config.wave else DurationModel.FLUID
    timeline = simulate_verified(schedule, w.cluster, model)
    cli_logger.info(f"{schedule.policy.value} 仿真完工时间 {timeline.makespan}")
    _emit(gantt_csv_text(timeline), config, stdout)


def _cmd_compare(config: RunConfig, stdout: TextIO) -> None:
    report = compare_report(_load(config))
    _emit(dumps_document(report.to_document()), config, stdout)


def _cmd_sweep_ratio(config: RunConfig, stdout: TextIO) -> None:
    w = _load(config)
    if config.budgets:
        results = budget_sweep(w, config.budgets)
        _emit(dumps_document({'sweeps': sweep_documents(results)}), config, stdout)
        return
    total = config.total_slots or (w.cluster.map_slots + w.cluster.reduce_slots)
    result = ratio_sweep(w, total)
    _emit(dumps_document(result.to_document()), config, stdout)


def _cmd_oracle(config: RunConfig, stdout: TextIO) -> None:
    uaas = uaas_schedule(_load(config))
    sequence, best = brute_force_best_order(durations_of(uaas.pools[0].jobs))
    doc = {
        'order': list(sequence.job_ids),
        'makespan': rational_doc(best),
        'uaas_order': uaas.order,
        'uaas_makespan': rational_doc(uaas.predicted_makespan),
        'matches_uaas': best == uaas.predicted_makespan,
    }
    _emit(dumps_document(doc), config, stdout)


def _cmd_gen(config: RunConfig, stdout: TextIO) -> None:
    w = generate_workload(
        seed=config.seed,
        n=config.n,
        duration_range=config.duration_range,
        demand_range=config.demand_range,
        cluster=ClusterConfig(map_slots=config.cluster[0], reduce_slots=config.cluster[1]),
    )
    _emit(dumps_document(dump_workload(w)), config, stdout)


def _cmd_stability(config: RunConfig, stdout: TextIO) -> None:
    try:
        factors = [parse_rational(value) for value in config.scale]
    except ValueError as e:
        raise ParameterException(f"--scale 无法解析: {e}", field="scale", value=config.scale) from e
    report = stability_check(_load(config), factors, config.nodes)
    _emit(dumps_document(report.to_document()), config, stdout)


HANDLERS = {
    'schedule': _cmd_schedule,
    'simulate': _cmd_simulate,
    'compare': _cmd_compare,
    'sweep-ratio': _cmd_sweep_ratio,
    'oracle': _cmd_oracle,
    'gen': _cmd_gen,
    'stability': _cmd_stability,
}


def run(config: RunConfig, stdout: Optional[TextIO] = None, stderr: Optional[TextIO] = None) -> int:
    """执行一条命令；成功返回 0，失败时在 stderr 输出诊断并返回错误码对应的退出码"""
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    try:
        HANDLERS[config.command](config, stdout)
        return 0
    except LabException as e:
        log_error_with_context(cli_logger, e, {'command': config.command, 'error_code': e.code})
        print(f"error: {e}", file=stderr)
        return get_exit_code(e.error_code)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='makespan-lab',
        description="MapReduce 两阶段作业调度实验工具",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
示例:
  # 对比三种策略
  python -m app.cli compare --workload app/fixtures/table1.json

  # 输出 MK_JR 的甘特图 CSV
  python -m app.cli simulate --workload app/fixtures/table1.json --policy mkjr --out gantt.csv

  # ρ 扫描（总槽位 20）
  python -m app.cli sweep-ratio --workload app/fixtures/twojob_tasks.json --total-slots 20
        """
    )
    parser.add_argument('command', choices=COMMANDS, help="子命令")
    parser.add_argument('--version', action='version', version=f"{settings.APP_NAME} {settings.APP_VERSION}")
    parser.add_argument('--workload', help="工作负载文件 (JSON)")
    parser.add_argument('--out', help="输出文件路径（不指定则写到标准输出）")
    parser.add_argument('--policy', choices=POLICIES, default='uaas', help="调度策略（默认: uaas）")
    parser.add_argument('--seed', type=int, default=0, help="gen 的随机种子（64 位无符号）")
    parser.add_argument('--n', type=int, default=5, help="gen 的作业数（默认: 5）")
    parser.add_argument('--duration-range', nargs=2, default=['1', '10'], metavar=('LO', 'HI'),
                        help="gen 的时长区间，接受十进制或 p/q（默认: 1 10）")
    parser.add_argument('--demand-range', nargs=2, type=int, default=[1, 10], metavar=('LO', 'HI'),
                        help="gen 的槽位需求区间（默认: 1 10）")
    parser.add_argument('--cluster', nargs=2, type=int, default=[10, 10], metavar=('MAP', 'REDUCE'),
                        help="gen 的集群槽位（默认: 10 10）")
    parser.add_argument('--total-slots', type=int, help="sweep-ratio 的总槽位预算（默认: 集群槽位之和）")
    parser.add_argument('--budgets', nargs='+', type=int, default=[], help="sweep-ratio 的多个预算")
    parser.add_argument('--scale', nargs='+', default=[], help="stability 的 ρ0 = 原槽位数 / 新槽位数")
    parser.add_argument('--nodes', nargs=2, type=int, metavar=('BEFORE', 'AFTER'),
                        help="stability 的节点数变化")
    parser.add_argument('--wave', action='store_true', help="simulate 使用离散波次时长模型")
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    args = build_parser().parse_args(argv)
    return RunConfig(
        command=args.command,
        workload_path=args.workload,
        output_path=args.out,
        policy=args.policy,
        seed=args.seed,
        n=args.n,
        duration_range=tuple(args.duration_range),
        demand_range=tuple(args.demand_range),
        cluster=tuple(args.cluster),
        total_slots=args.total_slots,
        budgets=list(args.budgets),
        scale=list(args.scale),
        nodes=tuple(args.nodes) if args.nodes else None,
        wave=args.wave,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    setup_logging()
    try:
        config = parse_config(argv)
    except LabException as e:
        print(f"error: {e}", file=sys.stderr)
        return get_exit_code(e.error_code)
    return run(config)
