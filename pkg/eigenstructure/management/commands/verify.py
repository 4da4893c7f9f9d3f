# eigenstructure/management/commands/verify.py
from django.core.management.base import BaseCommand, CommandError

from eigenstructure.exceptions import GeokitError, NumericalError, UnknownOperation
from eigenstructure.forms import VerifyOptionsForm, validated
from eigenstructure.reports import render
from eigenstructure.serializers import CheckReportSerializer
from eigenstructure.verification import check_ids, run_suite


class Command(BaseCommand):
    """
    python manage.py verify <check> [--trials N] [--seed S] [--nmax N]

    Runs seeded random trials of one structural identity (or all of them)
    and prints pass/fail counts with the first failing seed.
    Exit code 0 iff every trial passes.
    """
    help = "Run the seeded verification suites for the structural rank identities."

    def add_arguments(self, parser):
        parser.add_argument('check', help=f"One of: {', '.join(check_ids())}.")
        parser.add_argument('--trials', type=int)
        parser.add_argument('--seed', type=int)
        parser.add_argument('--nmax', type=int)
        parser.add_argument('--workers', type=int)
        parser.add_argument('--tol-rel', type=float, dest='tol_rel')
        parser.add_argument('--tol-abs', type=float, dest='tol_abs')
        parser.add_argument('--json-indent', type=int, dest='json_indent')

    def handle(self, *args, **options):
        check = options['check']
        form = VerifyOptionsForm(data={
            key: options.get(key)
            for key in ('trials', 'seed', 'nmax', 'workers', 'tol_rel', 'tol_abs', 'json_indent')
        })
        indent = 2
        try:
            form = validated(form)
            indent = form.indent()
            if check not in check_ids():
                raise UnknownOperation(f"Unknown check '{check}'; choose from {', '.join(check_ids())}.")
            reports = run_suite(check, form.options())
        except GeokitError as exc:
            self.stdout.write(render({'check': check, 'error': exc.as_dict()}, indent))
            raise CommandError(str(exc), returncode=exc.exit_code)

        summary = {
            'check': check,
            'ok': all(report.ok for report in reports),
            'reports': CheckReportSerializer(reports, many=True).data,
        }
        self.stdout.write(render(summary, indent))
        if not summary['ok']:
            failed = [report.check for report in reports if not report.ok]
            raise CommandError(f"Failing checks: {', '.join(failed)}", returncode=NumericalError.exit_code)
