# eigenstructure/forms.py
from django import forms

from .assignment import MODES
from .conf import default_tol, geokit_setting
from .exceptions import GeokitError, InputError
from .pencils import parse_lambdas
from .verification import VerifyOptions


class SpectrumField(forms.CharField):
    """
    A comma-separated eigenvalue list such as "-1,-2,-1+2i,-1-2i".
    Cleans to a SpectrumSpec (or None when left empty).
    """
    def to_python(self, value):
        value = super().to_python(value)
        if not value:
            return None
        try:
            return parse_lambdas(value)
        except GeokitError as exc:
            raise forms.ValidationError(str(exc), code=exc.code)


class ToleranceFormMixin(forms.Form):
    """
    The two tolerance flags shared by compute and verify.
    Missing values fall back to settings.GEOKIT (which reads the environment).
    """
    tol_rel = forms.FloatField(required=False)
    tol_abs = forms.FloatField(required=False, min_value=0.0)

    def clean_tol_rel(self):
        value = self.cleaned_data.get('tol_rel')
        if value is not None and not value > 0:
            raise forms.ValidationError("tol_rel must be positive.")
        return value

    def tolerance(self):
        return default_tol(self.cleaned_data.get('tol_rel'), self.cleaned_data.get('tol_abs'))


class ComputeOptionsForm(ToleranceFormMixin):
    """
    Flags of the compute command and of the API request "options" object.
    """
    lambdas = SpectrumField(required=False)
    mode = forms.ChoiceField(choices=[(mode, mode) for mode in MODES], required=False)
    json_indent = forms.IntegerField(required=False, min_value=0)

    def clean_mode(self):
        return self.cleaned_data.get('mode') or None # '' means "pick from p"

    def indent(self):
        value = self.cleaned_data.get('json_indent')
        return geokit_setting('JSON_INDENT') if value is None else value


class VerifyOptionsForm(ToleranceFormMixin):
    """
    Flags of the verify command.
    """
    trials = forms.IntegerField(required=False, min_value=1)
    seed = forms.IntegerField(required=False, min_value=0)
    nmax = forms.IntegerField(required=False, min_value=2, max_value=12)
    workers = forms.IntegerField(required=False, min_value=1)
    json_indent = forms.IntegerField(required=False, min_value=0)

    def _value(self, name, setting):
        value = self.cleaned_data.get(name)
        return geokit_setting(setting) if value is None else value

    def options(self):
        return VerifyOptions(
            trials=self._value('trials', 'TRIALS'),
            seed=self._value('seed', 'SEED'),
            nmax=self._value('nmax', 'NMAX'),
            tol=self.tolerance(),
            workers=self._value('workers', 'WORKERS'),
            retry_budget=geokit_setting('RETRY_BUDGET'),
        )

    def indent(self):
        return self._value('json_indent', 'JSON_INDENT')


def validated(form):
    """
    Returns the bound form once valid; turns form errors into an InputError.
    """
    if not form.is_valid():
        messages = [f"{field}: {' '.join(errors)}" for field, errors in form.errors.items()]
        raise InputError("; ".join(messages))
    return form
