from django.urls import path, include

urlpatterns = [
    # JSON compute API: /api/compute/ and /api/compute/<op>/
    path('api/', include('eigenstructure.urls')),
]
