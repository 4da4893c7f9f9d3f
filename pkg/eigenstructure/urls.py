# eigenstructure/urls.py
from django.urls import path
from . import api_views

app_name = 'eigenstructure'

urlpatterns = [
    # Available operations
    path('compute/', api_views.OperationListView.as_view(), name='operation_list'),

    # Run one operation on a posted system
    path('compute/<str:op>/', api_views.ComputeView.as_view(), name='compute'),
]
